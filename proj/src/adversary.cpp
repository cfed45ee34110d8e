#include "ccr/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace ccr {

std::string phase_name(Phase phase) { return phase == Phase::pre ? "pre" : "post"; }

Phase phase_from_name(const std::string& name) {
    if (name == "pre") return Phase::pre;
    if (name == "post") return Phase::post;
    throw std::invalid_argument("unknown phase: " + name);
}

void AdversaryContext::validate() const {
    if (ground_truth == nullptr || original == nullptr)
        throw std::invalid_argument("AdversaryContext: ground truth and original matrix required");
    if ((phase == Phase::post) != (pre_noise != nullptr))
        throw std::invalid_argument("AdversaryContext: pre_noise must be present iff phase is post");
}

namespace {

struct PlannedEdit {
    int i, j;
    double new_value;
};

// Applies the planned unordered-pair edits, or throws BudgetExceeded with the
// exact entry count the plan needs.
void commit(SymmetricMatrix& m, EditLedger& ledger, const std::vector<PlannedEdit>& plan) {
    long long needed = 0;
    for (const auto& e : plan)
        if (m(e.i, e.j) != e.new_value) needed += 2;
    if (needed > ledger.entry_budget - ledger.entries_used)
        throw BudgetExceeded("adversary budget exhausted: needs " + std::to_string(needed) +
                                 " entries, " +
                                 std::to_string(ledger.entry_budget - ledger.entries_used) +
                                 " available",
                             needed);
    for (const auto& e : plan) {
        const double old = m(e.i, e.j);
        if (old == e.new_value) continue;
        ledger.edits.push_back({e.i, e.j, old, e.new_value});
        ledger.edits.push_back({e.j, e.i, old, e.new_value});
        ledger.entries_used += 2;
        m.set(e.i, e.j, e.new_value);
    }
}

// Floyd's algorithm: `count` distinct values from [0, universe).
std::vector<std::uint64_t> sample_distinct(std::uint64_t universe, std::uint64_t count,
                                           SplitMix64& rng) {
    std::set<std::uint64_t> chosen;
    for (std::uint64_t j = universe - count; j < universe; ++j) {
        const std::uint64_t t = rng.next_below(j + 1);
        chosen.insert(chosen.count(t) ? j : t);
    }
    return {chosen.begin(), chosen.end()};
}

// Decodes a lexicographic unordered-pair index over i < j.
std::pair<int, int> decode_pair(std::uint64_t idx, int n) {
    for (int i = 0; i < n - 1; ++i) {
        const std::uint64_t row = static_cast<std::uint64_t>(n - 1 - i);
        if (idx < row) return {i, i + 1 + static_cast<int>(idx)};
        idx -= row;
    }
    throw std::logic_error("decode_pair: index out of range");
}

void strategy_random_flip(SymmetricMatrix& m, EditLedger& ledger,
                          const AdversaryParams& params, SplitMix64& rng) {
    const int n = m.size();
    const std::uint64_t total_pairs =
        static_cast<std::uint64_t>(n) * (n - 1) / 2;
    const long long pair_count = params.pair_count;
    if (pair_count < 0 || static_cast<std::uint64_t>(pair_count) > total_pairs)
        throw std::invalid_argument("random_flip: pair_count exceeds n(n-1)/2");
    if (2 * pair_count > ledger.entry_budget)
        throw BudgetExceeded("random_flip: needs " + std::to_string(2 * pair_count) + " entries",
                             2 * pair_count);
    if (pair_count == 0) return;

    std::vector<PlannedEdit> plan;
    plan.reserve(pair_count);
    for (std::uint64_t idx : sample_distinct(total_pairs, pair_count, rng)) {
        const auto [i, j] = decode_pair(idx, n);
        plan.push_back({i, j, -m(i, j)});
    }
    commit(m, ledger, plan);
}

std::vector<int> pick_vertices(int n, long long m_vertices, SplitMix64& rng) {
    if (m_vertices < 0 || m_vertices > n)
        throw std::invalid_argument("adversary: m_vertices out of range");
    std::vector<int> picked;
    for (std::uint64_t v : sample_distinct(n, m_vertices, rng)) picked.push_back(static_cast<int>(v));
    return picked;
}

void strategy_row_randomizer(SymmetricMatrix& m, EditLedger& ledger,
                             const AdversaryParams& params, SplitMix64& rng) {
    const int n = m.size();
    const auto picked = pick_vertices(n, params.m_vertices, rng);
    std::vector<char> is_picked(n, 0);
    for (int v : picked) is_picked[v] = 1;

    std::vector<PlannedEdit> plan;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (!is_picked[i] && !is_picked[j]) continue;
            plan.push_back({i, j, rng.next_sign()});
        }
    }
    commit(m, ledger, plan);
}

void strategy_info_eraser(SymmetricMatrix& m, EditLedger& ledger, const AdversaryContext& ctx,
                          const AdversaryParams& params, SplitMix64& rng) {
    const int n = m.size();
    const SymmetricMatrix& original = *ctx.original;
    const auto picked = pick_vertices(n, params.m_vertices, rng);
    std::vector<int> picked_slot(n, -1);
    for (std::size_t s = 0; s < picked.size(); ++s) picked_slot[picked[s]] = static_cast<int>(s);

    // Under the equivalent noise process an entry is kept (information
    // preserved) with probability 2*eps and re-randomized otherwise. Given
    // that M' agrees with M, the posterior probability of "kept" is
    // 2*eps / (1/2 + eps); sampling it reproduces the kept-set distribution.
    const double keep_posterior = (2.0 * ctx.epsilon) / (0.5 + ctx.epsilon);

    ledger.preserved_per_vertex.assign(picked.size(), 0);
    std::vector<PlannedEdit> plan;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (picked_slot[i] < 0 && picked_slot[j] < 0) continue;
            if (m(i, j) != original(i, j)) continue;
            if (!rng.next_bernoulli(keep_posterior)) continue;
            if (picked_slot[i] >= 0) ++ledger.preserved_per_vertex[picked_slot[i]];
            if (picked_slot[j] >= 0) ++ledger.preserved_per_vertex[picked_slot[j]];
            plan.push_back({i, j, rng.next_sign()});
        }
    }
    commit(m, ledger, plan);
}

void strategy_spectral_poison(SymmetricMatrix& m, EditLedger& ledger,
                              const AdversaryContext& ctx, SplitMix64& rng) {
    const int n = m.size();
    const ClusterPartition& truth = *ctx.ground_truth;
    if (truth.k != 2)
        throw std::invalid_argument("spectral_poison: strategy is defined for k = 2 only");
    const double eps = ctx.epsilon;
    if (4.0 * eps * n < 2.0)
        throw std::invalid_argument("spectral_poison: 4*eps*n < 2, poisoned set degenerate");

    const long long per_cluster = static_cast<long long>(std::ceil(2.0 * eps * n));
    const auto clusters = truth.members();
    for (const auto& c : clusters)
        if (static_cast<long long>(c.size()) < per_cluster)
            throw std::invalid_argument("spectral_poison: a cluster has fewer than ceil(2*eps*n) items");

    std::vector<int> poisoned;
    for (const auto& c : clusters) {
        for (std::uint64_t slot : sample_distinct(c.size(), per_cluster, rng))
            poisoned.push_back(c[slot]);
    }
    std::sort(poisoned.begin(), poisoned.end());
    if (poisoned.size() % 2 != 0) { // unreachable with 2 * per_cluster, kept as a guard
        poisoned.pop_back();
        ledger.warnings.push_back("spectral_poison: odd |S| adjusted by 1");
    }
    if (static_cast<int>(poisoned.size()) >= n)
        throw std::invalid_argument("spectral_poison: |S| = n leaves no outside columns to balance");

    std::vector<char> in_set(n, 0);
    for (int v : poisoned) in_set[v] = 1;

    // Minor step: every off-diagonal entry of the S x S minor becomes +1.
    std::vector<PlannedEdit> minor_plan;
    for (std::size_t a = 0; a < poisoned.size(); ++a)
        for (std::size_t b = a + 1; b < poisoned.size(); ++b)
            if (m(poisoned[a], poisoned[b]) != 1.0)
                minor_plan.push_back({poisoned[a], poisoned[b], 1.0});

    // Balance step: for each column outside S, flip the minimum number of
    // entries so the column sums to zero over S. |S| is even, so the +-1 sum
    // is even and exactly |sum|/2 flips of the majority sign suffice.
    std::vector<PlannedEdit> balance_plan;
    for (int j = 0; j < n; ++j) {
        if (in_set[j]) continue;
        long long colsum = 0;
        for (int i : poisoned) colsum += static_cast<long long>(m(i, j));
        const double majority = colsum > 0 ? 1.0 : -1.0;
        long long flips = std::llabs(colsum) / 2;
        for (int i : poisoned) {
            if (flips == 0) break;
            if (m(i, j) == majority) {
                balance_plan.push_back({std::min(i, j), std::max(i, j), -majority});
                --flips;
            }
        }
    }

    const long long needed = 2 * (static_cast<long long>(minor_plan.size()) +
                                  static_cast<long long>(balance_plan.size()));
    if (needed > ledger.entry_budget)
        throw BudgetExceeded("spectral_poison: needs exactly " + std::to_string(needed) +
                                 " entries, budget is " + std::to_string(ledger.entry_budget),
                             needed);

    commit(m, ledger, minor_plan);
    ledger.minor_entries_changed = ledger.entries_used;
    commit(m, ledger, balance_plan);
    ledger.balance_entries_changed = ledger.entries_used - ledger.minor_entries_changed;

    ledger.poisoned_set = poisoned;
    ledger.poison_vector.assign(n, 0.0);
    const double coord = 1.0 / std::sqrt(static_cast<double>(poisoned.size()));
    for (int v : poisoned) ledger.poison_vector[v] = coord;
}

} // namespace

std::vector<std::string> adversary_names() {
    return {"null", "pre_random_flip", "post_random_flip", "pre_row_randomizer",
            "post_info_eraser", "post_spectral_poison"};
}

PerturbResult perturb(const std::string& strategy, const SymmetricMatrix& input,
                      long long budget, const AdversaryContext& ctx,
                      const AdversaryParams& params, SplitMix64& rng) {
    ctx.validate();
    if (!is_sign_matrix(input))
        throw std::invalid_argument("perturb: input must be a {-1,+1} matrix");
    const long long n = input.size();
    if (budget < 0 || budget > n * n)
        throw std::invalid_argument("perturb: budget must lie in [0, n^2]");

    const bool is_pre = strategy.rfind("pre_", 0) == 0;
    const bool is_post = strategy.rfind("post_", 0) == 0;
    if (is_pre && ctx.phase != Phase::pre)
        throw std::invalid_argument("perturb: " + strategy + " requires the pre phase");
    if (is_post && ctx.phase != Phase::post)
        throw std::invalid_argument("perturb: " + strategy + " requires the post phase");

    PerturbResult res{input, EditLedger{}};
    res.ledger.entry_budget = budget;

    if (strategy == "null") {
        // identity adversary
    } else if (strategy == "pre_random_flip" || strategy == "post_random_flip") {
        strategy_random_flip(res.matrix, res.ledger, params, rng);
    } else if (strategy == "pre_row_randomizer") {
        strategy_row_randomizer(res.matrix, res.ledger, params, rng);
    } else if (strategy == "post_info_eraser") {
        strategy_info_eraser(res.matrix, res.ledger, ctx, params, rng);
    } else if (strategy == "post_spectral_poison") {
        strategy_spectral_poison(res.matrix, res.ledger, ctx, rng);
    } else {
        throw std::invalid_argument("perturb: unknown strategy '" + strategy + "'");
    }
    return res;
}

void write_ledger_csv(const std::filesystem::path& path, const EditLedger& ledger) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << "i,j,old,new\n";
    char buf[128];
    for (const auto& e : ledger.edits) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g\n", e.i, e.j, e.old_value, e.new_value);
        out << buf;
    }
}

} // namespace ccr
