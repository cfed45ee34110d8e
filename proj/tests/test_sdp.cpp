#include <doctest.h>

#include <cmath>

#include "ccr/model.hpp"
#include "ccr/sdp.hpp"
#include "test_util.hpp"

using namespace ccr;

namespace {

// Independent coordinate-ascent oracle for the two-sided vector program,
// closing over nothing from the library solver: each row of U (and V) is set
// to its exact best response in turn.
double bilinear_best_response_oracle(const SymmetricMatrix& a, int r, int sweeps,
                                     SplitMix64& rng) {
    const int n = a.size();
    std::vector<Vector> u(n, Vector(r)), v(n, Vector(r));
    for (auto& row : u)
        for (auto& x : row) x = 2.0 * rng.next_double() - 1.0;
    for (auto& row : v)
        for (auto& x : row) x = 2.0 * rng.next_double() - 1.0;
    auto renorm = [&](Vector& row) {
        const double s = norm2(row);
        if (s > 1e-12)
            for (auto& x : row) x /= s;
        else
            row[0] = 1.0;
    };
    for (auto& row : u) renorm(row);
    for (auto& row : v) renorm(row);

    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (int i = 0; i < n; ++i) { // u_i <- normalize(sum_j a_ij v_j)
            Vector best(r, 0.0);
            for (int j = 0; j < n; ++j)
                for (int c = 0; c < r; ++c) best[c] += a(i, j) * v[j][c];
            renorm(best);
            u[i] = best;
        }
        for (int j = 0; j < n; ++j) {
            Vector best(r, 0.0);
            for (int i = 0; i < n; ++i)
                for (int c = 0; c < r; ++c) best[c] += a(i, j) * u[i][c];
            renorm(best);
            v[j] = best;
        }
    }
    double obj = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) obj += a(i, j) * dot(u[i], v[j]);
    return obj;
}

} // namespace

TEST_SUITE_BEGIN("sdp");

TEST_CASE("zero and identity objectives") {
    SdpOptions opts;
    SplitMix64 rng(101);
    SymmetricMatrix zero(6);
    CHECK(solve_sdp_norm(zero, opts, rng).value == doctest::Approx(0.0).scale(1.0));

    SymmetricMatrix id(10);
    for (int i = 0; i < 10; ++i) id.set(i, i, 1.0);
    CHECK(solve_sdp_norm(id, opts, rng).value == doctest::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("value of P reaches n^2/(k-1)") {
    SplitMix64 rng(102);
    const auto p = make_partition(12, 3, rng);
    const auto sol = solve_sdp_norm(psd_zero_error(p), SdpOptions{}, rng);
    CHECK(sol.value == doctest::Approx(72.0).epsilon(0.01));

    // n = k boundary: value k^2/(k-1)
    ClusterPartition pk;
    pk.n = 3;
    pk.k = 3;
    pk.assignment = {0, 1, 2};
    const auto sol3 = solve_sdp_norm(psd_zero_error(pk), SdpOptions{}, rng);
    CHECK(sol3.value == doctest::Approx(4.5).epsilon(0.01));
}

TEST_CASE("solutions are feasible Gram matrices") {
    SplitMix64 rng(103);
    const auto a = testutil::random_sign_matrix(16, rng);
    const auto sol = solve_sdp_norm(a, SdpOptions{}, rng);
    for (int i = 0; i < 16; ++i) CHECK(sol.X(i, i) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.X.trace() == doctest::Approx(16.0).epsilon(1e-4));
    const auto spec = full_eigendecomposition(sol.X);
    CHECK(spec.pairs.back().value >= -1e-6 * operator_norm(sol.X, 1e-6));
}

TEST_CASE("restarts never lower the reported value") {
    SplitMix64 rng(104);
    const auto a = testutil::random_sign_matrix(12, rng);
    SdpOptions one;
    one.restarts = 1;
    SdpOptions three;
    three.restarts = 3;
    SplitMix64 r1(2024), r3(2024);
    const double v1 = solve_sdp_norm(a, one, r1).value;
    const double v3 = solve_sdp_norm(a, three, r3).value;
    CHECK(v3 >= v1 - 1e-9);
}

TEST_CASE("ground-truth witness lower-bounds the value") {
    SplitMix64 rng(105);
    const int n = 12, k = 3;
    const double eps = 0.25;
    const auto p = make_partition(n, k, rng);
    const auto P = psd_zero_error(p);
    SymmetricMatrix q(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) q.set(i, j, 2.0 * eps * P(i, j));
    const auto sol = solve_sdp_norm(q, SdpOptions{}, rng);
    const double witness = 2.0 * eps * n * n / (k - 1); // Q . P for X = P
    CHECK(sol.value >= witness * 0.99);
}

TEST_CASE("symmetric restriction is tight for PSD inputs") {
    SplitMix64 rng(106);
    for (int rep = 0; rep < 3; ++rep) {
        const int n = 8;
        // a PSD instance: G G^T
        SymmetricMatrix a(n);
        std::vector<Vector> g(n, Vector(3));
        for (auto& row : g)
            for (auto& x : row) x = 2.0 * rng.next_double() - 1.0;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) a.set(i, j, dot(g[i], g[j]));

        SdpOptions opts;
        const double sym = solve_sdp_norm(a, opts, rng).value;
        SplitMix64 oracle_rng(300 + rep);
        double two_sided = 0.0;
        for (int restart = 0; restart < 3; ++restart)
            two_sided = std::max(two_sided,
                                 bilinear_best_response_oracle(a, 5, 200, oracle_rng));
        CHECK(sym == doctest::Approx(two_sided).epsilon(0.01));
    }
}

TEST_CASE("zero-sum variant enforces the constraint") {
    SplitMix64 rng(107);
    const auto p = make_partition(12, 3, rng);
    const auto P = psd_zero_error(p);
    SdpOptions opts;
    const auto sol = solve_sdp_norm_zerosum(P, opts, rng);
    CHECK(sol.value == doctest::Approx(72.0).epsilon(0.01));
    double x_dot_ones = 0.0;
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) x_dot_ones += sol.X(i, j);
    CHECK(std::fabs(x_dot_ones) <= 1e-3 * 144.0);

    SymmetricMatrix ones(10);
    for (int i = 0; i < 10; ++i)
        for (int j = i; j < 10; ++j) ones.set(i, j, 1.0);
    const auto sol_ones = solve_sdp_norm_zerosum(ones, opts, rng);
    CHECK(std::fabs(sol_ones.value) <= 1e-3 * 100.0);
}

TEST_CASE("zero-sum residual stays small on random sign matrices") {
    SdpOptions opts;
    for (int seed = 0; seed < 20; ++seed) {
        SplitMix64 rng(1080 + seed);
        const auto a = testutil::random_sign_matrix(16, rng);
        const auto sol = solve_sdp_norm_zerosum(a, opts, rng);
        double x_dot_ones = 0.0;
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) x_dot_ones += sol.X(i, j);
        CHECK(std::fabs(x_dot_ones) <= 1e-3 * 256.0);
    }
}

TEST_CASE("zero-sum variant reports unenforceable constraints") {
    // the zero matrix gives zero penalty weights, so the random factor's row
    // sum stays far from zero and the final check must throw
    SdpOptions opts;
    SplitMix64 rng(108);
    SymmetricMatrix zero(16);
    CHECK_THROWS_AS(solve_sdp_norm_zerosum(zero, opts, rng), SdpNoConvergence);
}

TEST_CASE("an impossible iteration budget surfaces as non-convergence") {
    SdpOptions opts;
    opts.max_iters = 3; // cannot reach a 50-iteration plateau
    SplitMix64 rng(112);
    SymmetricMatrix id(6);
    for (int i = 0; i < 6; ++i) id.set(i, i, 1.0);
    try {
        solve_sdp_norm(id, opts, rng);
        FAIL("expected SdpNoConvergence");
    } catch (const SdpNoConvergence& e) {
        CHECK(e.best_effort.X.size() == 6);
    }
}

TEST_CASE("eigenvector sampling") {
    SplitMix64 rng(109);
    // rank one: always the single atom
    const auto v = testutil::random_orthonormal(6, 1, rng)[0];
    SdpSolution rank1;
    rank1.X = testutil::from_spectrum(6, {6.0}, {v});
    for (int rep = 0; rep < 10; ++rep) {
        const auto u = sample_eigenvector(rank1, rng);
        CHECK(std::fabs(dot(u, v)) == doctest::Approx(1.0).epsilon(1e-6));
    }

    // identity: uniform over the basis
    SdpSolution ident;
    ident.X = SymmetricMatrix(4);
    for (int i = 0; i < 4; ++i) ident.X.set(i, i, 1.0);
    std::vector<int> counts(4, 0);
    for (int rep = 0; rep < 2000; ++rep) {
        const auto u = sample_eigenvector(ident, rng);
        for (int i = 0; i < 4; ++i)
            if (std::fabs(u[i]) > 0.9) ++counts[i];
    }
    const double sigma = std::sqrt(2000 * 0.25 * 0.75);
    for (int i = 0; i < 4; ++i) CHECK(std::fabs(counts[i] - 500.0) <= 4.0 * sigma);

    SdpSolution negative;
    negative.X = SymmetricMatrix(3);
    for (int i = 0; i < 3; ++i) negative.X.set(i, i, -1.0);
    CHECK_THROWS_AS(sample_eigenvector(negative, rng), std::runtime_error);
}

TEST_CASE("samples from the exact-expectation program stay in the signal span") {
    SplitMix64 rng(110);
    const int n = 12, k = 3;
    const double eps = 0.25;
    const auto p = make_partition(n, k, rng);
    const auto P = psd_zero_error(p);
    SymmetricMatrix q(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) q.set(i, j, 2.0 * eps * P(i, j));
    const auto sol = solve_sdp_norm(q, SdpOptions{}, rng);
    const auto basis = orthogonal_basis(p);
    for (int draw = 0; draw < 50; ++draw) {
        const auto u = sample_eigenvector(sol, rng);
        double proj = 0.0;
        for (const auto& b : basis) {
            const double c = dot(b, u);
            proj += c * c;
        }
        CHECK(proj >= 0.99);
    }
}

TEST_CASE("grothendieck bracket") {
    SdpOptions opts;
    SplitMix64 rng(111);

    SymmetricMatrix zero(5);
    const auto z = grothendieck_bracket(zero, opts, rng);
    CHECK(z.sdp_value == 0.0);
    CHECK(z.lower == 0.0);
    CHECK(z.upper == 0.0);

    ClusterPartition p4;
    p4.n = 4;
    p4.k = 2;
    p4.assignment = {0, 0, 1, 1};
    const auto P = psd_zero_error(p4);
    const auto gb = grothendieck_bracket(P, opts, rng);
    const double brute = infty_to_one_bruteforce(P);
    CHECK(brute == doctest::Approx(16.0));
    CHECK(gb.sdp_value == doctest::Approx(16.0).epsilon(0.01));
    CHECK(gb.lower <= brute * 1.001);
    CHECK(brute <= gb.upper * 1.02);

    for (int seed = 0; seed < 10; ++seed) {
        SplitMix64 r(1110 + seed);
        const auto a = testutil::random_sign_matrix(8, r);
        const double bf = infty_to_one_bruteforce(a);
        const auto res = grothendieck_bracket(a, opts, r);
        CHECK(bf <= res.sdp_value * 1.02);
        CHECK(res.sdp_value <= 1.783 * bf + 0.02 * bf);
    }
}

TEST_SUITE_END();
