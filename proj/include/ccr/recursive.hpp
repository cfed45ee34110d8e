#pragma once

#include <vector>

#include "ccr/matrix.hpp"
#include "ccr/model.hpp"
#include "ccr/rng.hpp"
#include "ccr/sdp.hpp"

namespace ccr {

enum class SdpVariant { with_epsilon, epsilon_free };

std::string variant_name(SdpVariant v);
SdpVariant variant_from_name(const std::string& name);

// One subproblem of the recursion: the surviving index set, the number of
// clusters believed inside it, the norm-distance certificate f, and the
// rescale factor for negative entries.
struct RecursionFrame {
    std::vector<int> index_set;
    int k_prime = 0;
    double f = 0.0;
    double gamma = 1.0;
};

struct RecursionGlobals {
    int n = 0;
    int k = 0;
    const SymmetricMatrix* Q = nullptr;
    double epsilon = 0.5;
    SdpVariant variant = SdpVariant::with_epsilon;
};

struct RecursionTraceEntry {
    int depth = 0;
    int n_prime = 0;
    int k_prime = 0;
    double f = 0.0;
    double gamma = 1.0;
    double delta = 0.0;
    double threshold = 0.0;
    int s1_size = 0;
    int k_double_prime = 0;
    double sdp_value = 0.0;
};

struct RecursionAbort : std::runtime_error {
    int k_prime;
    int n_prime;
    RecursionAbort(const std::string& what, int kp, int np)
        : std::runtime_error(what), k_prime(kp), n_prime(np) {}
};

// Threshold sampling on robust order statistics: sort u, take the values at
// ranks ceil(delta^(1/3) n') from both ends, sample uniformly between them.
double get_threshold(const Vector& u, int n_prime, double delta, SplitMix64& rng);

// The closest-integer rounding of count / base used to size a split; halves
// round away from zero.
int round_to_cluster_multiple(long long count, long long base);

// Multiplies the negative entries by gamma; symmetry is preserved.
SymmetricMatrix rescale_negatives(const SymmetricMatrix& a, double gamma);

// The recursive SDP bisection. Returns the index sets of the reconstructed
// clusters; aborts (throws RecursionAbort) when a split rounds to an empty or
// full side.
std::vector<std::vector<int>> recursive_clust(const RecursionFrame& frame,
                                              const RecursionGlobals& globals,
                                              const SdpOptions& opts, SplitMix64& rng,
                                              std::vector<RecursionTraceEntry>* trace = nullptr);

// f for the first invocation with B = 0: 16 n sqrt(n).
double default_f0(int n);

// End-to-end reconstruction from the observed sign matrix: builds P'' and Q
// (or Q~ with the zero-sum SDP for the epsilon-free variant), then runs the
// recursion from the full index set.
ClusterPartition sdp_reconstruct(const SymmetricMatrix& mpp, int n, int k, double epsilon,
                                 double f0, SdpVariant variant, const SdpOptions& opts,
                                 SplitMix64& rng,
                                 std::vector<RecursionTraceEntry>* trace = nullptr);

} // namespace ccr
