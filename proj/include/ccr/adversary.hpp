#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ccr/matrix.hpp"
#include "ccr/model.hpp"
#include "ccr/rng.hpp"

namespace ccr {

enum class Phase { pre, post };

std::string phase_name(Phase phase);
Phase phase_from_name(const std::string& name);

// Record of adversarial entry changes. Every unordered pair edit is recorded
// as its two ordered mirror entries, so entries_used == edits.size() and a
// pair costs 2 against the budget.
struct EditLedger {
    struct Edit {
        int i, j;
        double old_value, new_value;
    };
    std::vector<Edit> edits;
    long long entry_budget = 0;
    long long entries_used = 0;

    // spectral_poison side channel
    std::vector<int> poisoned_set;
    Vector poison_vector;
    long long minor_entries_changed = 0;
    long long balance_entries_changed = 0;

    // info_eraser side channel: preserved-entry count per chosen vertex
    std::vector<long long> preserved_per_vertex;

    std::vector<std::string> warnings;
};

struct BudgetExceeded : std::runtime_error {
    long long entries_needed;
    BudgetExceeded(const std::string& what, long long needed)
        : std::runtime_error(what), entries_needed(needed) {}
};

struct AdversaryContext {
    const ClusterPartition* ground_truth = nullptr;
    const SymmetricMatrix* original = nullptr;  // M
    const SymmetricMatrix* pre_noise = nullptr; // M', post phase only
    double epsilon = 0.5;
    Phase phase = Phase::pre;

    void validate() const;
};

struct AdversaryParams {
    long long m_vertices = 0;
    long long pair_count = 0;
};

struct PerturbResult {
    SymmetricMatrix matrix;
    EditLedger ledger;
};

// Applies the named strategy to a sign matrix under the given budget
// (counted in ordered entries). Strategies:
//   null                 identity
//   pre_random_flip      negate pair_count random unordered pairs (pre)
//   post_random_flip     same mechanics, post phase
//   pre_row_randomizer   randomize all pairs incident to m_vertices items
//   post_info_eraser     re-randomize the information-preserving entries of
//                        m_vertices items
//   post_spectral_poison plant an all-ones minor with zero-sum boundary
//                        columns (k = 2 only)
PerturbResult perturb(const std::string& strategy, const SymmetricMatrix& input,
                      long long budget, const AdversaryContext& ctx,
                      const AdversaryParams& params, SplitMix64& rng);

std::vector<std::string> adversary_names();

// CSV dump with columns (i, j, old, new).
void write_ledger_csv(const std::filesystem::path& path, const EditLedger& ledger);

} // namespace ccr
