#include "ccr/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ccr {

void write_matrix(const std::filesystem::path& path, const SymmetricMatrix& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    const int n = m.size();
    out << n << '\n';
    char buf[64];
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            out << buf << (j + 1 == n ? '\n' : ' ');
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

SymmetricMatrix read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    int n = 0;
    if (!(in >> n) || n < 1) throw std::runtime_error("matrix file: bad dimension line");
    std::vector<double> entries(static_cast<std::size_t>(n) * n);
    for (auto& v : entries)
        if (!(in >> v)) throw std::runtime_error("matrix file: truncated or non-numeric data");
    return SymmetricMatrix::from_entries(n, std::move(entries));
}

void write_partition(const std::filesystem::path& path, const ClusterPartition& p) {
    p.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << p.n << ' ' << p.k << '\n';
    for (int i = 0; i < p.n; ++i) out << p.assignment[i] << (i + 1 == p.n ? '\n' : ' ');
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

ClusterPartition read_partition(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    ClusterPartition p;
    if (!(in >> p.n >> p.k)) throw std::runtime_error("partition file: bad header line");
    p.assignment.resize(p.n);
    for (auto& label : p.assignment)
        if (!(in >> label)) throw std::runtime_error("partition file: truncated labels");
    p.validate();
    return p;
}

} // namespace ccr
