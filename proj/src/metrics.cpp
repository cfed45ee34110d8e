#include "ccr/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace ccr {

namespace {

std::vector<std::vector<long long>> overlap_matrix(const ClusterPartition& predicted,
                                                   const ClusterPartition& truth) {
    std::vector<std::vector<long long>> overlap(truth.k, std::vector<long long>(predicted.k, 0));
    for (int i = 0; i < truth.n; ++i)
        ++overlap[truth.assignment[i]][predicted.assignment[i]];
    return overlap;
}

// Hungarian algorithm (potentials form) for a square min-cost assignment.
// Returns the column matched to each row.
std::vector<int> min_cost_assignment(const std::vector<std::vector<long long>>& cost) {
    const int n = static_cast<int>(cost.size());
    const long long inf = std::numeric_limits<long long>::max() / 4;
    std::vector<long long> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> match(n + 1, 0); // match[col] = row (1-based)
    std::vector<int> way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<long long> minv(n + 1, inf);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = match[j0];
            long long delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const long long cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
    return row_to_col;
}

} // namespace

MatchResult misclassified_count(const ClusterPartition& predicted, const ClusterPartition& truth) {
    predicted.validate();
    truth.validate();
    if (predicted.n != truth.n)
        throw std::invalid_argument("misclassified_count: partitions are over different n");

    const auto overlap = overlap_matrix(predicted, truth);
    const int s = std::max(truth.k, predicted.k);

    long long max_entry = 0;
    for (const auto& row : overlap)
        for (long long w : row) max_entry = std::max(max_entry, w);

    // Pad to square and convert max-weight to min-cost.
    std::vector<std::vector<long long>> cost(s, std::vector<long long>(s, max_entry));
    for (int t = 0; t < truth.k; ++t)
        for (int p = 0; p < predicted.k; ++p) cost[t][p] = max_entry - overlap[t][p];

    const auto assign = min_cost_assignment(cost);

    MatchResult res;
    res.bijection.assign(truth.k, -1);
    long long correct = 0;
    for (int t = 0; t < truth.k; ++t) {
        const int p = assign[t];
        if (p >= 0 && p < predicted.k) {
            res.bijection[t] = p;
            correct += overlap[t][p];
        }
    }
    res.correctly_classified = static_cast<int>(correct);
    res.misclassified = truth.n - res.correctly_classified;
    return res;
}

int misclassified_bruteforce(const ClusterPartition& predicted, const ClusterPartition& truth) {
    predicted.validate();
    truth.validate();
    if (predicted.n != truth.n)
        throw std::invalid_argument("misclassified_bruteforce: partitions are over different n");
    if (std::max(predicted.k, truth.k) > 6)
        throw std::invalid_argument("misclassified_bruteforce: k too large for enumeration");

    const auto overlap = overlap_matrix(predicted, truth);
    const int big = std::max(truth.k, predicted.k);
    const bool truth_small = truth.k <= predicted.k;

    std::vector<int> perm(big);
    std::iota(perm.begin(), perm.end(), 0);
    long long best = 0;
    do {
        long long total = 0;
        if (truth_small) {
            for (int t = 0; t < truth.k; ++t) total += overlap[t][perm[t]];
        } else {
            for (int p = 0; p < predicted.k; ++p) total += overlap[perm[p]][p];
        }
        best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));

    return truth.n - static_cast<int>(best);
}

} // namespace ccr
