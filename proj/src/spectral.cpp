#include "ccr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ccr {

void SpectralConfig::validate() const {
    if (ratio_cutoff <= 1.0)
        throw std::invalid_argument("SpectralConfig: ratio_cutoff must exceed 1");
    if (k_max < 2) throw std::invalid_argument("SpectralConfig: k_max must be >= 2");
    if (eig_tol <= 0.0) throw std::invalid_argument("SpectralConfig: eig_tol must be positive");
}

namespace {

double ratio_at(const std::vector<EigenPair>& pairs, int k) {
    const double guard = 1e-12 * std::fabs(pairs[0].value);
    const double num = std::fabs(pairs[k - 2].value);
    const double den = std::fabs(pairs[k - 1].value);
    if (den <= guard)
        return num > guard ? std::numeric_limits<double>::infinity() : 1.0;
    return num / den;
}

} // namespace

int detect_k(const Spectrum& spec, const SpectralConfig& cfg) {
    cfg.validate();
    const int available = static_cast<int>(spec.pairs.size());
    if (available < 2) throw NoSpectralGap("no spectral gap found: fewer than 2 eigenpairs");
    const int limit = std::min(cfg.k_max, available);
    for (int k = 2; k <= limit; ++k)
        if (ratio_at(spec.pairs, k) > cfg.ratio_cutoff) return k;
    throw NoSpectralGap("no spectral gap found up to k_max");
}

std::vector<std::vector<int>> get_clusters(const std::vector<Vector>& vectors, double t) {
    if (vectors.empty()) throw std::invalid_argument("get_clusters: need at least one vector");
    const int n = static_cast<int>(vectors[0].size());
    for (const auto& v : vectors)
        if (static_cast<int>(v.size()) != n)
            throw std::invalid_argument("get_clusters: vectors must share one length");

    std::vector<std::vector<int>> sets(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            bool close = true;
            for (const auto& v : vectors) {
                if (std::fabs(v[i] - v[j]) > t) {
                    close = false;
                    break;
                }
            }
            if (close) sets[i].push_back(j);
        }
    }
    return sets;
}

SpectralResult spectral_cluster(const SymmetricMatrix& mpp, const SpectralConfig& cfg,
                                SplitMix64& rng) {
    cfg.validate();
    if (!is_sign_matrix(mpp))
        throw std::invalid_argument("spectral_cluster: input must be a {-1,+1} matrix");
    const int n = mpp.size();
    const double t = cfg.threshold_t > 0.0 ? cfg.threshold_t : 1.0 / (2.0 * std::sqrt(2.0 * n));
    const double shift = frobenius_norm(mpp);
    const int k_limit = std::min(cfg.k_max, n);

    // Eigenvalues are computed lazily, one deflation slot at a time, until the
    // ratio rule fires. The final probe value (and any slot inside a nearly
    // degenerate leading group) may stop on value stagnation; leading vectors
    // are refined to the strict residual target afterwards, the probe is not
    // needed as a vector at all.
    std::vector<EigenPair> pairs;
    std::vector<char> strict;
    int detected = 0;
    for (int j = 1; j <= k_limit; ++j) {
        PowerIterationResult r = power_iterate(mpp, shift, pairs, cfg.eig_tol, cfg.eig_max_iter,
                                               true, 1e-3, 0x5bec7247ULL + j);
        pairs.push_back(EigenPair{r.value, std::move(r.vector), r.residual});
        strict.push_back(r.converged ? 1 : 0);
        if (j >= 2 && ratio_at(pairs, j) > cfg.ratio_cutoff) {
            detected = j;
            break;
        }
    }
    if (detected == 0) throw NoSpectralGap("no spectral gap found up to k_max");

    // Leading vectors go to a quarter of the target so the Rayleigh-Ritz
    // mixing below cannot push any single pair back over it.
    const double refine_tol = 0.25 * cfg.eig_tol;
    for (int slot = 0; slot < detected - 1; ++slot) {
        const std::vector<EigenPair> deflated(pairs.begin(), pairs.begin() + slot);
        PowerIterationResult r =
            power_iterate(mpp, shift, deflated, refine_tol, cfg.eig_max_iter, false,
                          refine_tol, 0x5bec7247ULL, &pairs[slot].vector);
        pairs[slot] = EigenPair{r.value, std::move(r.vector), r.residual};
        strict[slot] = 1;
    }

    std::vector<EigenPair> leading_pairs(pairs.begin(), pairs.begin() + (detected - 1));
    rayleigh_ritz_refine(mpp, leading_pairs);
    for (const auto& p : leading_pairs)
        if (p.residual > cfg.eig_tol * std::max(1.0, std::fabs(p.value)))
            throw ConvergenceError("spectral_cluster: eigenvector residual above target",
                                   p.value, p.residual);

    std::vector<Vector> leading;
    leading.reserve(detected - 1);
    for (auto& p : leading_pairs) leading.push_back(std::move(p.vector));
    const auto tentative = get_clusters(leading, t);

    std::vector<char> assigned(n, 0);
    int unassigned = n;
    const int cap = cfg.pivot_attempt_cap > 0 ? cfg.pivot_attempt_cap : n;
    std::vector<std::vector<int>> clusters;

    for (int round = 0; round < detected - 1; ++round) {
        std::vector<int> pool;
        pool.reserve(unassigned);
        for (int i = 0; i < n; ++i)
            if (!assigned[i]) pool.push_back(i);

        bool found = false;
        for (int attempt = 0; attempt < cap && !pool.empty(); ++attempt) {
            const auto idx = rng.next_below(pool.size());
            const int pivot = pool[idx];
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));

            std::vector<int> cluster;
            for (int j : tentative[pivot])
                if (!assigned[j]) cluster.push_back(j);
            if (static_cast<double>(cluster.size()) >= n / (2.0 * detected)) {
                for (int j : cluster) assigned[j] = 1;
                unassigned -= static_cast<int>(cluster.size());
                clusters.push_back(std::move(cluster));
                found = true;
                break;
            }
        }
        if (!found) throw PivotError("pivot search failed");
    }
    if (unassigned == 0) throw PivotError("pivot search failed: no items left for the last cluster");

    std::vector<int> rest;
    rest.reserve(unassigned);
    for (int i = 0; i < n; ++i)
        if (!assigned[i]) rest.push_back(i);
    clusters.push_back(std::move(rest));

    SpectralResult res;
    res.detected_k = detected;
    res.partition.n = n;
    res.partition.k = detected;
    res.partition.assignment.assign(n, 0);
    for (int c = 0; c < detected; ++c)
        for (int i : clusters[c]) res.partition.assignment[i] = c;
    res.partition.validate();
    return res;
}

} // namespace ccr
