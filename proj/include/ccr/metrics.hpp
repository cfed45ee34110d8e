#pragma once

#include <vector>

#include "ccr/model.hpp"

namespace ccr {

// Result of matching predicted clusters against the ground truth under the
// best injective assignment. bijection[t] is the predicted cluster matched to
// truth cluster t, or -1 when t is unmatched.
struct MatchResult {
    int correctly_classified = 0;
    int misclassified = 0;
    std::vector<int> bijection;
};

// Maximum-weight matching on the truth x predicted overlap matrix (Hungarian
// method). Unmatched clusters contribute zero overlap, so outputs with a
// cluster count different from the truth degrade gracefully.
MatchResult misclassified_count(const ClusterPartition& predicted, const ClusterPartition& truth);

// Exhaustive oracle over all injections of the smaller cluster set into the
// larger one; guarded to max(k_pred, k_truth) <= 6.
int misclassified_bruteforce(const ClusterPartition& predicted, const ClusterPartition& truth);

} // namespace ccr
