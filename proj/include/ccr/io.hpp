#pragma once

#include <filesystem>

#include "ccr/matrix.hpp"
#include "ccr/model.hpp"

namespace ccr {

// Matrix text format: first line "n", then n lines of n space-separated
// reals written with 17 significant digits. Readers reject non-symmetric
// input (tolerance 1e-12).
void write_matrix(const std::filesystem::path& path, const SymmetricMatrix& m);
SymmetricMatrix read_matrix(const std::filesystem::path& path);

// Partition text format: first line "n k", second line n labels in [0, k).
void write_partition(const std::filesystem::path& path, const ClusterPartition& p);
ClusterPartition read_partition(const std::filesystem::path& path);

} // namespace ccr
