#pragma once

#include <cstdint>
#include <vector>

#include "ccr/matrix.hpp"
#include "ccr/rng.hpp"

namespace ccr {

// Assignment of n items to k clusters; labels live in [0, k) and every
// cluster is nonempty.
struct ClusterPartition {
    int n = 0;
    int k = 0;
    std::vector<int> assignment;

    std::vector<int> sizes() const;
    std::vector<std::vector<int>> members() const;
    bool equinumerous() const;
    void validate() const;
};

struct ModelParams {
    int n = 0;
    int k = 0;
    double epsilon = 0.5;
    long long budget = 0; // adversary budget B, counted in ordered entries
    std::uint64_t seed = 0;

    void validate() const;
};

// Equal-size partition (requires k | n): a uniformly random permutation of the
// size template, deterministic given the generator state.
ClusterPartition make_partition(int n, int k, SplitMix64& rng);

// Near-equal mode: integer sizes within `slack` of n/k, summing to n.
ClusterPartition make_partition_near_equal(int n, int k, int slack, SplitMix64& rng);

// ceil(n^0.6) / k, the default slack for the near-equal mode.
int default_near_equal_slack(int n, int k);

// M: +1 within clusters, -1 across; diagonal +1.
SymmetricMatrix zero_error_matrix(const ClusterPartition& p);

// Orthonormal basis v_1..v_{k-1} of the leading eigenspace of M (and of P):
// v_i = (1/sqrt(n/k)) * ( sum_{j<=i} f_j / sqrt(i^2+i) - i * f_{i+1} / sqrt(i^2+i) ).
// Requires an equinumerous partition.
std::vector<Vector> orthogonal_basis(const ClusterPartition& p);

// Independently negates every unordered off-diagonal pair with probability
// 1/2 - epsilon (one coin per pair, mirrored); the diagonal is untouched.
SymmetricMatrix apply_noise(const SymmetricMatrix& m, double epsilon, SplitMix64& rng);

// P: +1 within clusters, -1/(k-1) across. PSD with eigenvalue n/(k-1) of
// multiplicity k-1. Requires an equinumerous partition.
SymmetricMatrix psd_zero_error(const ClusterPartition& p);

// Turns the -1 entries of a sign matrix into -1/(k-1); +1 entries unchanged.
SymmetricMatrix clip_to_P(const SymmetricMatrix& signs, int k);

// Q := P'' - (1/2 - epsilon) * (1 - 1/(k-1)) * ones; E[Q] = 2 epsilon P.
SymmetricMatrix build_Q(const SymmetricMatrix& ppp, double epsilon, int k);

// Q~ := (k / (2(k-1))) * M''; the epsilon-free recentring of P''.
SymmetricMatrix build_Q_tilde(const SymmetricMatrix& mpp, int k);

// True when every entry is exactly +1 or -1.
bool is_sign_matrix(const SymmetricMatrix& m);

} // namespace ccr
