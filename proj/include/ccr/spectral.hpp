#pragma once

#include <vector>

#include "ccr/matrix.hpp"
#include "ccr/model.hpp"
#include "ccr/rng.hpp"

namespace ccr {

struct SpectralConfig {
    double threshold_t = 0.0;  // <= 0 means 1 / (2 sqrt(2n)), resolved per matrix
    double ratio_cutoff = 2.0;
    int k_max = 64;            // detection cap; effective cap is min(k_max, n)
    int pivot_attempt_cap = 0; // <= 0 means n
    double eig_tol = 1e-6;
    int eig_max_iter = 500000;

    void validate() const;
};

struct NoSpectralGap : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PivotError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Smallest k >= 2 with |lambda_{k-1}| / |lambda_k| > ratio_cutoff. The ratio
// counts as +infinity when |lambda_k| < 1e-12 * |lambda_1| but the numerator
// is not (exact zeros occur in noiseless instances).
int detect_k(const Spectrum& spec, const SpectralConfig& cfg);

// Tentative clusters: S_i = { j : |(v_h)_i - (v_h)_j| <= t for every h }.
std::vector<std::vector<int>> get_clusters(const std::vector<Vector>& vectors, double t);

struct SpectralResult {
    ClusterPartition partition;
    int detected_k = 0;
};

// The full spectral pipeline: detect k by the eigenvalue-ratio rule, build
// tentative clusters from the k-1 leading eigenvectors, then extract k-1
// clusters by pivot sampling and collect the rest into the k-th.
SpectralResult spectral_cluster(const SymmetricMatrix& mpp, const SpectralConfig& cfg,
                                SplitMix64& rng);

} // namespace ccr
