#include "ccr/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace ccr {

std::vector<int> ClusterPartition::sizes() const {
    std::vector<int> s(k, 0);
    for (int label : assignment) ++s[label];
    return s;
}

std::vector<std::vector<int>> ClusterPartition::members() const {
    std::vector<std::vector<int>> m(k);
    for (int i = 0; i < n; ++i) m[assignment[i]].push_back(i);
    return m;
}

bool ClusterPartition::equinumerous() const {
    if (n % k != 0) return false;
    const auto s = sizes();
    return std::all_of(s.begin(), s.end(), [&](int c) { return c == n / k; });
}

void ClusterPartition::validate() const {
    if (n < 1 || k < 1 || static_cast<int>(assignment.size()) != n)
        throw std::invalid_argument("ClusterPartition: inconsistent sizes");
    for (int label : assignment)
        if (label < 0 || label >= k)
            throw std::invalid_argument("ClusterPartition: label out of range");
    for (int c : sizes())
        if (c == 0) throw std::invalid_argument("ClusterPartition: empty cluster");
}

void ModelParams::validate() const {
    if (k < 2 || k > n) throw std::invalid_argument("ModelParams: need 2 <= k <= n");
    if (!(epsilon > 0.0 && epsilon <= 0.5))
        throw std::invalid_argument("ModelParams: need 0 < epsilon <= 1/2");
    if (budget < 0 || budget > static_cast<long long>(n) * n)
        throw std::invalid_argument("ModelParams: need 0 <= B <= n^2");
}

namespace {

ClusterPartition from_sizes(int n, int k, const std::vector<int>& sizes, SplitMix64& rng) {
    ClusterPartition p;
    p.n = n;
    p.k = k;
    p.assignment.reserve(n);
    for (int c = 0; c < k; ++c) p.assignment.insert(p.assignment.end(), sizes[c], c);
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(p.assignment[i], p.assignment[j]);
    }
    return p;
}

} // namespace

ClusterPartition make_partition(int n, int k, SplitMix64& rng) {
    if (k < 2) throw std::invalid_argument("make_partition: k must be >= 2");
    if (n % k != 0)
        throw std::invalid_argument("make_partition: equal mode requires k | n");
    return from_sizes(n, k, std::vector<int>(k, n / k), rng);
}

ClusterPartition make_partition_near_equal(int n, int k, int slack, SplitMix64& rng) {
    if (k < 2) throw std::invalid_argument("make_partition_near_equal: k must be >= 2");
    if (slack < 0) throw std::invalid_argument("make_partition_near_equal: slack must be >= 0");

    // Integer sizes in [ceil(n/k - slack), floor(n/k + slack)], all >= 1.
    const long long lo_num = static_cast<long long>(n) - static_cast<long long>(slack) * k;
    if (lo_num < k)
        throw std::invalid_argument("make_partition_near_equal: slack allows an empty cluster");
    const int lo = static_cast<int>((lo_num + k - 1) / k);
    const int hi = static_cast<int>((static_cast<long long>(n) + static_cast<long long>(slack) * k) / k);
    if (static_cast<long long>(lo) * k > n || static_cast<long long>(hi) * k < n)
        throw std::invalid_argument("make_partition_near_equal: no feasible sizes for this slack");

    std::vector<int> sizes(k);
    long long total = 0;
    for (int c = 0; c < k; ++c) {
        sizes[c] = lo + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(hi - lo) + 1));
        total += sizes[c];
    }
    int c = 0;
    while (total != n) { // repair the sum without leaving [lo, hi]
        if (total > n && sizes[c] > lo) {
            --sizes[c];
            --total;
        } else if (total < n && sizes[c] < hi) {
            ++sizes[c];
            ++total;
        }
        c = (c + 1) % k;
    }
    return from_sizes(n, k, sizes, rng);
}

int default_near_equal_slack(int n, int k) {
    return static_cast<int>(std::ceil(std::pow(static_cast<double>(n), 0.6))) / k;
}

SymmetricMatrix zero_error_matrix(const ClusterPartition& p) {
    p.validate();
    SymmetricMatrix m(p.n);
    for (int i = 0; i < p.n; ++i)
        for (int j = i; j < p.n; ++j)
            m.set(i, j, p.assignment[i] == p.assignment[j] ? 1.0 : -1.0);
    return m;
}

std::vector<Vector> orthogonal_basis(const ClusterPartition& p) {
    p.validate();
    if (!p.equinumerous())
        throw std::invalid_argument("orthogonal_basis: partition must be equinumerous");
    const int n = p.n, k = p.k;
    const double cluster_scale = 1.0 / std::sqrt(static_cast<double>(n) / k);

    std::vector<Vector> basis;
    basis.reserve(k - 1);
    for (int i = 1; i <= k - 1; ++i) {
        const double denom = std::sqrt(static_cast<double>(i) * i + i);
        Vector v(n, 0.0);
        for (int item = 0; item < n; ++item) {
            const int label = p.assignment[item]; // cluster j is label j-1
            if (label < i)
                v[item] = cluster_scale / denom;
            else if (label == i)
                v[item] = -cluster_scale * i / denom;
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

bool is_sign_matrix(const SymmetricMatrix& m) {
    for (double v : m.data())
        if (v != 1.0 && v != -1.0) return false;
    return true;
}

SymmetricMatrix apply_noise(const SymmetricMatrix& m, double epsilon, SplitMix64& rng) {
    if (!is_sign_matrix(m))
        throw std::invalid_argument("apply_noise: input must be a {-1,+1} matrix");
    if (!(epsilon > 0.0 && epsilon <= 0.5))
        throw std::invalid_argument("apply_noise: need 0 < epsilon <= 1/2");
    const int n = m.size();
    const double flip_probability = 0.5 - epsilon;
    SymmetricMatrix out(n);
    for (int i = 0; i < n; ++i) {
        out.set(i, i, m(i, i));
        for (int j = i + 1; j < n; ++j) {
            const double v = m(i, j);
            out.set(i, j, rng.next_bernoulli(flip_probability) ? -v : v);
        }
    }
    return out;
}

SymmetricMatrix psd_zero_error(const ClusterPartition& p) {
    p.validate();
    if (p.k < 2) throw std::invalid_argument("psd_zero_error: k must be >= 2");
    if (!p.equinumerous())
        throw std::invalid_argument("psd_zero_error: partition must be equinumerous");
    const double off = -1.0 / (p.k - 1);
    SymmetricMatrix m(p.n);
    for (int i = 0; i < p.n; ++i)
        for (int j = i; j < p.n; ++j)
            m.set(i, j, p.assignment[i] == p.assignment[j] ? 1.0 : off);
    return m;
}

SymmetricMatrix clip_to_P(const SymmetricMatrix& signs, int k) {
    if (k < 2) throw std::invalid_argument("clip_to_P: k must be >= 2");
    if (!is_sign_matrix(signs))
        throw std::invalid_argument("clip_to_P: input must be a {-1,+1} matrix");
    const double off = -1.0 / (k - 1);
    const int n = signs.size();
    SymmetricMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) out.set(i, j, signs(i, j) > 0 ? 1.0 : off);
    return out;
}

SymmetricMatrix build_Q(const SymmetricMatrix& ppp, double epsilon, int k) {
    if (k < 2) throw std::invalid_argument("build_Q: k must be >= 2");
    const double shift = (0.5 - epsilon) * (1.0 - 1.0 / (k - 1));
    const int n = ppp.size();
    SymmetricMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) out.set(i, j, ppp(i, j) - shift);
    return out;
}

SymmetricMatrix build_Q_tilde(const SymmetricMatrix& mpp, int k) {
    if (k < 2) throw std::invalid_argument("build_Q_tilde: k must be >= 2");
    if (!is_sign_matrix(mpp))
        throw std::invalid_argument("build_Q_tilde: input must be a {-1,+1} matrix");
    const double scale = static_cast<double>(k) / (2.0 * (k - 1));
    const int n = mpp.size();
    SymmetricMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) out.set(i, j, scale * mpp(i, j));
    return out;
}

} // namespace ccr
