#include "ccr/recursive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ccr {

std::string variant_name(SdpVariant v) {
    return v == SdpVariant::with_epsilon ? "eps" : "eps-free";
}

SdpVariant variant_from_name(const std::string& name) {
    if (name == "eps" || name == "with_epsilon") return SdpVariant::with_epsilon;
    if (name == "eps-free" || name == "epsilon_free") return SdpVariant::epsilon_free;
    throw std::invalid_argument("unknown SDP variant: " + name);
}

double default_f0(int n) { return 16.0 * n * std::sqrt(static_cast<double>(n)); }

// The paper-form delta = 4k sqrt(f / (eps n^2)) exceeds 1 for every size this
// lab can run, which would push the Get-Threshold ranks past n'/2 and abort
// deterministically. The rank-determining delta is therefore capped so the
// order statistics stay within the first and last quartile.
static constexpr double kDeltaCap = 1.0 / 64.0; // cbrt = 1/4

double get_threshold(const Vector& u, int n_prime, double delta, SplitMix64& rng) {
    if (!(delta > 0.0)) throw std::invalid_argument("get_threshold: delta must be positive");
    if (static_cast<int>(u.size()) != n_prime)
        throw std::invalid_argument("get_threshold: vector length does not match n'");
    const long long rank = static_cast<long long>(std::ceil(std::cbrt(delta) * n_prime));
    if (2 * rank > n_prime)
        throw std::runtime_error("get_threshold: degenerate order statistics (rank > n'/2)");

    Vector sorted(u);
    std::sort(sorted.begin(), sorted.end());
    const double t_min = sorted[rank - 1];
    const double t_max = sorted[n_prime - rank - 1];
    if (t_min > t_max) throw std::runtime_error("get_threshold: t_min > t_max");
    return rng.next_in(t_min, t_max);
}

SymmetricMatrix rescale_negatives(const SymmetricMatrix& a, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("rescale_negatives: gamma must be positive");
    const int n = a.size();
    SymmetricMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = a(i, j);
            out.set(i, j, v < 0.0 ? gamma * v : v);
        }
    return out;
}

int round_to_cluster_multiple(long long count, long long base) {
    if (base < 1) throw std::invalid_argument("round_to_cluster_multiple: base must be >= 1");
    if (count < 0) throw std::invalid_argument("round_to_cluster_multiple: count must be >= 0");
    return static_cast<int>((2 * count + base) / (2 * base));
}

namespace {

std::vector<std::vector<int>> recurse(const RecursionFrame& frame, const RecursionGlobals& globals,
                                      const SdpOptions& opts, SplitMix64& rng,
                                      std::vector<RecursionTraceEntry>* trace, int depth) {
    const int base_size = globals.n / globals.k;
    const int n_prime = static_cast<int>(frame.index_set.size());
    if (n_prime % base_size != 0 || frame.k_prime != n_prime / base_size)
        throw std::logic_error("recursive_clust: frame invariants violated");

    if (n_prime == base_size) return {frame.index_set};

    const double delta_raw =
        4.0 * globals.k *
        std::sqrt(frame.f / (globals.epsilon * static_cast<double>(globals.n) * globals.n));
    const double delta = std::min(delta_raw, kDeltaCap);

    const SymmetricMatrix q_sub = submatrix(*globals.Q, frame.index_set, frame.index_set);
    const SymmetricMatrix q_scaled = rescale_negatives(q_sub, frame.gamma);

    SplitMix64 sdp_rng = rng.split();
    const SdpSolution sol = globals.variant == SdpVariant::epsilon_free
                                ? solve_sdp_norm_zerosum(q_scaled, opts, sdp_rng)
                                : solve_sdp_norm(q_scaled, opts, sdp_rng);
    const Vector u = sample_eigenvector(sol, rng);
    const double t = get_threshold(u, n_prime, delta, rng);

    long long s1_count = 0;
    for (double v : u)
        if (v < t) ++s1_count;
    const int k_dd = round_to_cluster_multiple(s1_count, base_size);

    if (trace != nullptr)
        trace->push_back({depth, n_prime, frame.k_prime, frame.f, frame.gamma, delta, t,
                          static_cast<int>(s1_count), k_dd, sol.value});

    if (k_dd == 0 || k_dd == frame.k_prime)
        throw RecursionAbort("recursion failed: split rounds to an empty or full side",
                             frame.k_prime, n_prime);

    // Cardinality fix: the k'' * n/k smallest coordinates, ties by index.
    std::vector<int> order(n_prime);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return u[a] < u[b]; });

    std::vector<int> left, right;
    left.reserve(static_cast<std::size_t>(k_dd) * base_size);
    for (int p = 0; p < k_dd * base_size; ++p) left.push_back(frame.index_set[order[p]]);
    std::sort(left.begin(), left.end());
    std::vector<char> in_left(globals.n, 0);
    for (int v : left) in_left[v] = 1;
    for (int v : frame.index_set)
        if (!in_left[v]) right.push_back(v);

    const double f_prime = globals.k * frame.f +
                           4.0 * globals.k * std::cbrt(delta) * globals.epsilon *
                               static_cast<double>(n_prime) * n_prime;
    const int k_left = k_dd;
    const int k_right = frame.k_prime - k_dd;
    // gamma is unused by base-case children; 1 stands in for the 0/0 form.
    const double gamma_left = k_left >= 2 ? static_cast<double>(frame.k_prime - 1) / (k_left - 1) : 1.0;
    const double gamma_right =
        k_right >= 2 ? static_cast<double>(frame.k_prime - 1) / (k_right - 1) : 1.0;

    SplitMix64 rng_left = rng.split();
    SplitMix64 rng_right = rng.split();
    auto c1 = recurse({std::move(left), k_left, f_prime, gamma_left}, globals, opts, rng_left,
                      trace, depth + 1);
    auto c2 = recurse({std::move(right), k_right, f_prime, gamma_right}, globals, opts, rng_right,
                      trace, depth + 1);
    c1.insert(c1.end(), std::make_move_iterator(c2.begin()), std::make_move_iterator(c2.end()));
    return c1;
}

} // namespace

std::vector<std::vector<int>> recursive_clust(const RecursionFrame& frame,
                                              const RecursionGlobals& globals,
                                              const SdpOptions& opts, SplitMix64& rng,
                                              std::vector<RecursionTraceEntry>* trace) {
    if (globals.Q == nullptr) throw std::invalid_argument("recursive_clust: globals.Q is null");
    if (globals.k < 1 || globals.n % globals.k != 0)
        throw std::invalid_argument("recursive_clust: k must divide n");
    return recurse(frame, globals, opts, rng, trace, 0);
}

ClusterPartition sdp_reconstruct(const SymmetricMatrix& mpp, int n, int k, double epsilon,
                                 double f0, SdpVariant variant, const SdpOptions& opts,
                                 SplitMix64& rng, std::vector<RecursionTraceEntry>* trace) {
    if (mpp.size() != n) throw std::invalid_argument("sdp_reconstruct: matrix size != n");
    if (k < 2 || n % k != 0) throw std::invalid_argument("sdp_reconstruct: need k >= 2 and k | n");
    if (!(epsilon > 0.0 && epsilon <= 0.5))
        throw std::invalid_argument("sdp_reconstruct: need 0 < epsilon <= 1/2");
    if (!is_sign_matrix(mpp))
        throw std::invalid_argument("sdp_reconstruct: input must be a {-1,+1} matrix");

    const SymmetricMatrix q = variant == SdpVariant::with_epsilon
                                  ? build_Q(clip_to_P(mpp, k), epsilon, k)
                                  : build_Q_tilde(mpp, k);

    RecursionGlobals globals{n, k, &q, epsilon, variant};
    RecursionFrame root;
    root.index_set.resize(n);
    std::iota(root.index_set.begin(), root.index_set.end(), 0);
    root.k_prime = k;
    root.f = f0;
    root.gamma = 1.0;

    const auto sets = recursive_clust(root, globals, opts, rng, trace);

    ClusterPartition p;
    p.n = n;
    p.k = static_cast<int>(sets.size());
    p.assignment.assign(n, -1);
    for (std::size_t c = 0; c < sets.size(); ++c)
        for (int item : sets[c]) {
            if (p.assignment[item] != -1)
                throw std::logic_error("sdp_reconstruct: recursion returned overlapping sets");
            p.assignment[item] = static_cast<int>(c);
        }
    p.validate();
    return p;
}

} // namespace ccr
