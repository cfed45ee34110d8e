#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ccr/matrix.hpp"
#include "ccr/model.hpp"
#include "ccr/rng.hpp"
#include "test_util.hpp"

using namespace ccr;

TEST_SUITE_BEGIN("matrix");

TEST_CASE("construction rejects asymmetric input") {
    CHECK_THROWS_AS(SymmetricMatrix::from_entries(2, {1.0, 2.0, 3.0, 4.0}), std::invalid_argument);
    auto m = SymmetricMatrix::from_entries(2, {1.0, 2.0, 2.0, 4.0});
    CHECK(m(0, 1) == 2.0);
}

TEST_CASE("frobenius norm") {
    SymmetricMatrix id3(3);
    for (int i = 0; i < 3; ++i) id3.set(i, i, 1.0);
    CHECK(frobenius_norm(id3) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));

    SplitMix64 rng(11);
    const auto p = make_partition(12, 3, rng);
    CHECK(frobenius_norm(psd_zero_error(p)) == doctest::Approx(12.0 / std::sqrt(2.0)).epsilon(1e-12));

    // independent oracle: direct double sum
    auto a = testutil::random_symmetric(5, rng);
    double sum = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) sum += a(i, j) * a(i, j);
    CHECK(frobenius_norm(a) == doctest::Approx(std::sqrt(sum)).epsilon(1e-15));
}

TEST_CASE("operator norm on model matrices") {
    SymmetricMatrix zero(4);
    CHECK(operator_norm(zero) == 0.0);

    SplitMix64 rng(12);
    const auto p = make_partition(12, 3, rng);
    CHECK(operator_norm(zero_error_matrix(p), 1e-9) == doctest::Approx(8.0).epsilon(1e-7));
    CHECK(operator_norm(psd_zero_error(p), 1e-9) == doctest::Approx(6.0).epsilon(1e-7));
}

TEST_CASE("top_eigenpairs: rank-1 case") {
    SplitMix64 rng(13);
    const auto v = testutil::random_orthonormal(6, 1, rng)[0];
    const auto a = testutil::from_spectrum(6, {5.0}, {v});
    const auto spec = top_eigenpairs(a, 1, 1e-10);
    CHECK(spec.pairs[0].value == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(std::fabs(dot(spec.pairs[0].vector, v)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("top_eigenpairs: zero-error matrix top values") {
    SplitMix64 rng(14);
    const auto m = zero_error_matrix(make_partition(12, 3, rng));
    const auto spec = top_eigenpairs(m, 3, 1e-9);
    CHECK(spec.pairs[0].value == doctest::Approx(8.0).epsilon(1e-8));
    CHECK(spec.pairs[1].value == doctest::Approx(8.0).epsilon(1e-8));
    CHECK(std::fabs(spec.pairs[2].value) < 1e-8);
}

TEST_CASE("top_eigenpairs agrees with the full decomposition") {
    SplitMix64 rng(15);
    const auto a = testutil::random_symmetric(8, rng);
    const auto top = top_eigenpairs(a, 8, 1e-10);
    const auto full = full_eigendecomposition(a, 1e-8);
    for (int i = 0; i < 8; ++i)
        CHECK(top.pairs[i].value == doctest::Approx(full.pairs[i].value).epsilon(1e-6));
}

TEST_CASE("full_eigendecomposition: diagonal matrix") {
    SymmetricMatrix d(3);
    d.set(0, 0, 3.0);
    d.set(1, 1, 1.0);
    d.set(2, 2, -2.0);
    const auto spec = full_eigendecomposition(d);
    CHECK(spec.pairs[0].value == doctest::Approx(3.0));
    CHECK(spec.pairs[1].value == doctest::Approx(1.0));
    CHECK(spec.pairs[2].value == doctest::Approx(-2.0));
    // eigenvectors are the standard basis up to sign
    CHECK(std::fabs(spec.pairs[0].vector[0]) == doctest::Approx(1.0));
    CHECK(std::fabs(spec.pairs[1].vector[1]) == doctest::Approx(1.0));
    CHECK(std::fabs(spec.pairs[2].vector[2]) == doctest::Approx(1.0));
}

TEST_CASE("full_eigendecomposition: rank-1 zero-error matrix for k=2") {
    SplitMix64 rng(16);
    const auto spec = full_eigendecomposition(zero_error_matrix(make_partition(8, 2, rng)));
    CHECK(spec.pairs[0].value == doctest::Approx(8.0).epsilon(1e-10));
    for (int i = 1; i < 8; ++i) CHECK(std::fabs(spec.pairs[i].value) < 1e-8);
}

TEST_CASE("full_eigendecomposition reconstructs the matrix") {
    SplitMix64 rng(17);
    const auto a = testutil::random_symmetric(10, rng);
    const auto spec = full_eigendecomposition(a, 1e-8);
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            double s = 0.0;
            for (const auto& p : spec.pairs) s += p.value * p.vector[i] * p.vector[j];
            CHECK(std::fabs(s - a(i, j)) < 1e-8);
        }
    }
}

TEST_CASE("spectrum invariants: descending order and orthogonality") {
    SplitMix64 rng(18);
    for (int rep = 0; rep < 5; ++rep) {
        const auto a = testutil::random_symmetric(9, rng);
        const auto spec = full_eigendecomposition(a);
        for (std::size_t i = 0; i + 1 < spec.pairs.size(); ++i)
            CHECK(spec.pairs[i].value >= spec.pairs[i + 1].value);
        for (std::size_t i = 0; i < spec.pairs.size(); ++i) {
            CHECK(norm2(spec.pairs[i].vector) == doctest::Approx(1.0).epsilon(1e-9));
            for (std::size_t j = i + 1; j < spec.pairs.size(); ++j)
                CHECK(std::fabs(dot(spec.pairs[i].vector, spec.pairs[j].vector)) <= 1e-6);
        }
    }
}

TEST_CASE("submatrix basics") {
    SplitMix64 rng(19);
    const auto a = testutil::random_symmetric(5, rng);
    const std::vector<int> all{0, 1, 2, 3, 4};
    const auto same = submatrix(a, all, all);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) CHECK(same(i, j) == a(i, j));

    ClusterPartition p;
    p.n = 4;
    p.k = 2;
    p.assignment = {0, 0, 1, 1};
    const auto m = zero_error_matrix(p);
    const std::vector<int> idx{0, 2};
    const auto sub = submatrix(m, idx, idx);
    CHECK(sub(0, 0) == 1.0);
    CHECK(sub(0, 1) == -1.0);
    CHECK(sub(1, 0) == -1.0);
    CHECK(sub(1, 1) == 1.0);

    const std::vector<int> bad{0, 9};
    CHECK_THROWS_AS(submatrix(a, bad, bad), std::out_of_range);
    const std::vector<int> r{0, 1}, c{0, 2};
    CHECK_THROWS_AS(submatrix(a, r, c), std::invalid_argument);
}

TEST_CASE("principal restriction never increases the infinity-to-1 norm") {
    SplitMix64 rng(20);
    for (int rep = 0; rep < 50; ++rep) {
        const auto a = testutil::random_symmetric(6, rng);
        const double full = infty_to_one_bruteforce(a);
        const int m = 2 + static_cast<int>(rng.next_below(4));
        std::vector<int> idx;
        for (int i = 0; i < 6 && static_cast<int>(idx.size()) < m; ++i)
            if (rng.next_below(2) || 6 - i == m - static_cast<int>(idx.size())) idx.push_back(i);
        const auto sub = submatrix(a, idx, idx);
        CHECK(infty_to_one_bruteforce(sub) <= full + 1e-12);
    }
}

TEST_CASE("infinity-to-1 brute force on closed-form cases") {
    SymmetricMatrix ones(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) ones.set(i, j, 1.0);
    CHECK(infty_to_one_bruteforce(ones) == doctest::Approx(4.0));

    ClusterPartition p3;
    p3.n = 3;
    p3.k = 3;
    p3.assignment = {0, 1, 2};
    CHECK(infty_to_one_bruteforce(psd_zero_error(p3)) == doctest::Approx(4.0).epsilon(1e-12));

    ClusterPartition p4;
    p4.n = 4;
    p4.k = 2;
    p4.assignment = {0, 0, 1, 1};
    CHECK(infty_to_one_bruteforce(zero_error_matrix(p4)) == doctest::Approx(16.0));

    SymmetricMatrix big(17);
    CHECK_THROWS_AS(infty_to_one_bruteforce(big), std::invalid_argument);
}

TEST_CASE("norm sandwich on low-rank instances") {
    SplitMix64 rng(21);
    const int n = 12;
    for (int rep = 0; rep < 100; ++rep) {
        const int r = 1 + static_cast<int>(rng.next_below(5));
        std::vector<double> d(r);
        for (auto& x : d) x = (rng.next_below(2) ? 1.0 : -1.0) * (0.5 + 1.5 * rng.next_double());
        const auto v = testutil::random_orthonormal(n, r, rng);
        const auto a = testutil::from_spectrum(n, d, v);

        const double op = operator_norm(a, 1e-9);
        const double fro2 = frobenius_norm(a) * frobenius_norm(a);
        CHECK(op * op <= fro2 + 1e-9);
        CHECK(fro2 <= (r + 1e-6) * op * op + 1e-9);
    }
}

TEST_CASE("infinity-to-1 vs operator norm") {
    SplitMix64 rng(22);
    for (int rep = 0; rep < 25; ++rep) {
        const int n = 2 + static_cast<int>(rng.next_below(11));
        const auto a = testutil::random_symmetric(n, rng);
        CHECK(infty_to_one_bruteforce(a) <= n * operator_norm(a, 1e-9) + 1e-6);
    }
}

TEST_CASE("eigenvalue stability under perturbation") {
    SplitMix64 rng(23);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 4 + static_cast<int>(rng.next_below(7));
        const auto a = testutil::random_symmetric(n, rng);
        const auto e = testutil::random_symmetric(n, rng, 0.25);
        SymmetricMatrix sum(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) sum.set(i, j, a(i, j) + e(i, j));

        const auto sa = full_eigendecomposition(a);
        const auto ss = full_eigendecomposition(sum);
        const double bound = operator_norm(e, 1e-9) + 1e-6;
        for (int i = 0; i < n; ++i)
            CHECK(std::fabs(sa.pairs[i].value - ss.pairs[i].value) <= bound);
    }
}

TEST_CASE("subspace stability under perturbation") {
    SplitMix64 rng(24);
    const int n = 8;
    for (int rep = 0; rep < 10; ++rep) {
        const int k = 2 + static_cast<int>(rng.next_below(2));
        // spectrum with a controlled gap below position k
        std::vector<double> d(n);
        for (int i = 0; i < n; ++i) d[i] = (i < k ? 5.0 : 1.0) + 0.2 * rng.next_double();
        std::sort(d.begin(), d.end(), std::greater<>());
        const auto v = testutil::random_orthonormal(n, n, rng);
        const auto a = testutil::from_spectrum(n, d, v);
        const auto e = testutil::random_symmetric(n, rng, 0.05);
        SymmetricMatrix sum(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) sum.set(i, j, a(i, j) + e(i, j));

        const auto sa = full_eigendecomposition(a);
        const auto ss = full_eigendecomposition(sum);
        const double gap = sa.pairs[k - 1].value - sa.pairs[k].value;
        REQUIRE(gap > 0.0);

        // || V V^T - V'' V''^T ||_F
        double fro2 = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double pa = 0.0, pb = 0.0;
                for (int h = 0; h < k; ++h) {
                    pa += sa.pairs[h].vector[i] * sa.pairs[h].vector[j];
                    pb += ss.pairs[h].vector[i] * ss.pairs[h].vector[j];
                }
                fro2 += (pa - pb) * (pa - pb);
            }
        const double bound = 2.0 * std::sqrt(static_cast<double>(k)) *
                                 operator_norm(e, 1e-9) / gap +
                             1e-6;
        CHECK(std::sqrt(fro2) <= bound);
    }
}

TEST_CASE("operator norm concentration for random sign matrices") {
    SplitMix64 rng(25);
    const int n = 400;
    for (int rep = 0; rep < 20; ++rep) {
        const auto a = testutil::random_sign_matrix(n, rng);
        CHECK(operator_norm(a, 1e-3, 50000) <= 16.0 * std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("top_eigenpairs validates m") {
    SymmetricMatrix a(4);
    CHECK_THROWS_AS(top_eigenpairs(a, 5), std::invalid_argument);
    CHECK_THROWS_AS(top_eigenpairs(a, 0), std::invalid_argument);
}

TEST_CASE("non-convergence carries the best iterate") {
    SplitMix64 rng(26);
    const auto a = testutil::random_symmetric(6, rng);
    try {
        top_eigenpairs(a, 2, 1e-14, 2);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(std::isfinite(e.best_value));
        CHECK(e.best_residual >= 0.0);
    }
}

TEST_SUITE_END();
