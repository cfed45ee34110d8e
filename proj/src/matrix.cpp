#include "ccr/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccr/rng.hpp"

namespace ccr {

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

SymmetricMatrix::SymmetricMatrix(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("SymmetricMatrix: n must be >= 1");
    a_.assign(static_cast<std::size_t>(n) * n, 0.0);
}

SymmetricMatrix SymmetricMatrix::from_entries(int n, std::vector<double> entries) {
    if (n < 1) throw std::invalid_argument("SymmetricMatrix: n must be >= 1");
    if (entries.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("SymmetricMatrix: entry count does not match n*n");
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double u = entries[static_cast<std::size_t>(i) * n + j];
            const double l = entries[static_cast<std::size_t>(j) * n + i];
            if (!(std::fabs(u - l) <= 1e-12))
                throw std::invalid_argument("SymmetricMatrix: input is not symmetric");
            entries[static_cast<std::size_t>(j) * n + i] = u;
        }
    }
    SymmetricMatrix m(n);
    m.a_ = std::move(entries);
    return m;
}

Vector SymmetricMatrix::multiply(const Vector& x) const {
    Vector y(n_, 0.0);
    const double* row = a_.data();
    for (int i = 0; i < n_; ++i, row += n_) {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

double SymmetricMatrix::trace() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += (*this)(i, i);
    return s;
}

double frobenius_norm(const SymmetricMatrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

namespace {

void project_out(Vector& y, const std::vector<EigenPair>& basis) {
    for (const auto& p : basis) {
        const double c = dot(p.vector, y);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] -= c * p.vector[i];
    }
}

double honest_residual(const SymmetricMatrix& a, const Vector& v, double value) {
    Vector av = a.multiply(v);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = av[i] - value * v[i];
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace

PowerIterationResult power_iterate(const SymmetricMatrix& a, double shift,
                                   const std::vector<EigenPair>& deflated,
                                   double tol, int max_iter,
                                   bool allow_value_plateau, double plateau_tol,
                                   std::uint64_t salt,
                                   const Vector* warm_start) {
    const int n = a.size();
    constexpr int kWindow = 25;

    SplitMix64 rng(hash_seed(salt, hash_seed(static_cast<std::uint64_t>(n),
                                             static_cast<std::uint64_t>(deflated.size()))));
    Vector x;
    if (warm_start != nullptr) {
        x = *warm_start;
    } else {
        x.resize(n);
        for (auto& v : x) v = rng.next_double() - 0.5;
    }
    project_out(x, deflated);
    double xn = norm2(x);
    while (xn < 1e-12) { // start landed in the deflated span; re-draw
        for (auto& v : x) v = rng.next_double() - 0.5;
        project_out(x, deflated);
        xn = norm2(x);
    }
    for (auto& v : x) v /= xn;

    double theta = 0.0;
    double window_theta = std::numeric_limits<double>::infinity();
    PowerIterationResult res;

    for (int iter = 1; iter <= max_iter; ++iter) {
        Vector y = a.multiply(x);
        for (int i = 0; i < n; ++i) y[i] += shift * x[i];
        project_out(y, deflated);

        theta = dot(x, y);
        double rsq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = y[i] - theta * x[i];
            rsq += d * d;
        }
        const double value = theta - shift;
        const double target = tol * std::max(1.0, std::fabs(value));

        res.iterations = iter;
        if (std::sqrt(rsq) <= target) {
            // Convergence is judged on the deflated operator; the recorded
            // residual is measured against A itself (callers running with
            // deflation repair the leftover via rayleigh_ritz_refine).
            res.value = value;
            res.vector = x;
            res.residual = honest_residual(a, x, value);
            res.converged = true;
            return res;
        }
        if (allow_value_plateau && iter % kWindow == 0) {
            if (std::fabs(theta - window_theta) <=
                plateau_tol * std::max(1.0, std::fabs(value))) {
                res.value = value;
                res.vector = x;
                res.residual = honest_residual(a, x, value);
                res.converged = false;
                return res;
            }
            window_theta = theta;
        }

        const double yn = norm2(y);
        if (yn < 1e-300) {
            // x lies in the kernel of the shifted, deflated operator: an exact
            // eigenvector with eigenvalue -shift.
            res.value = -shift;
            res.vector = x;
            res.residual = honest_residual(a, x, -shift);
            res.converged = res.residual <= tol * std::max(1.0, shift);
            return res;
        }
        for (int i = 0; i < n; ++i) x[i] = y[i] / yn;
    }

    res.value = theta - shift;
    res.vector = x;
    res.residual = honest_residual(a, x, res.value);
    res.converged = false;
    throw ConvergenceError("power iteration did not converge after " +
                               std::to_string(max_iter) + " iterations",
                           res.value, res.residual);
}

double operator_norm(const SymmetricMatrix& a, double tol, int max_iter) {
    if (tol <= 0.0) throw std::invalid_argument("operator_norm: tol must be positive");
    const double c = frobenius_norm(a);
    if (c == 0.0) return 0.0;

    const std::vector<EigenPair> none;
    // Algebraically largest eigenvalue of A.
    const double top = power_iterate(a, c, none, tol, max_iter, true, tol, 0x0bULL).value;

    const int n = a.size();
    SymmetricMatrix neg(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) neg.set(i, j, -a(i, j));
    const double bottom = power_iterate(neg, c, none, tol, max_iter, true, tol, 0x0bULL).value;

    return std::max(top, bottom);
}

void rayleigh_ritz_refine(const SymmetricMatrix& a, std::vector<EigenPair>& pairs) {
    const int m = static_cast<int>(pairs.size());
    if (m == 0) return;
    const int n = a.size();

    // two-pass modified Gram-Schmidt
    for (int i = 0; i < m; ++i) {
        Vector& v = pairs[i].vector;
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j < i; ++j) {
                const double c = dot(pairs[j].vector, v);
                for (int t = 0; t < n; ++t) v[t] -= c * pairs[j].vector[t];
            }
        }
        const double nv = norm2(v);
        if (nv < 1e-12)
            throw ConvergenceError("rayleigh_ritz_refine: vectors are not independent", 0.0, 0.0);
        for (double& x : v) x /= nv;
    }

    std::vector<Vector> w(m);
    for (int i = 0; i < m; ++i) w[i] = a.multiply(pairs[i].vector);
    SymmetricMatrix h(m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
            h.set(i, j, 0.5 * (dot(pairs[i].vector, w[j]) + dot(pairs[j].vector, w[i])));
    const Spectrum hs = full_eigendecomposition(h, 1e-6);

    std::vector<EigenPair> out(m);
    for (int r = 0; r < m; ++r) {
        out[r].value = hs.pairs[r].value;
        out[r].vector.assign(n, 0.0);
        Vector av(n, 0.0); // A times the Ritz vector, assembled from the cached products
        for (int j = 0; j < m; ++j) {
            const double c = hs.pairs[r].vector[j];
            for (int t = 0; t < n; ++t) {
                out[r].vector[t] += c * pairs[j].vector[t];
                av[t] += c * w[j][t];
            }
        }
        double rsq = 0.0;
        for (int t = 0; t < n; ++t) {
            const double d = av[t] - out[r].value * out[r].vector[t];
            rsq += d * d;
        }
        out[r].residual = std::sqrt(rsq);
    }
    pairs = std::move(out);
}

Spectrum top_eigenpairs(const SymmetricMatrix& a, int m, double tol, int max_iter) {
    const int n = a.size();
    if (m < 1 || m > n) throw std::invalid_argument("top_eigenpairs: need 1 <= m <= n");
    const double c = frobenius_norm(a);

    Spectrum spec;
    spec.tolerance = tol;
    for (int slot = 0; slot < m; ++slot) {
        PowerIterationResult r = power_iterate(a, c, spec.pairs, tol, max_iter,
                                               false, tol, 0x70eULL);
        spec.pairs.push_back(EigenPair{r.value, std::move(r.vector), r.residual});
    }
    rayleigh_ritz_refine(a, spec.pairs);
    for (const auto& p : spec.pairs)
        if (p.residual > tol * std::max(1.0, std::fabs(p.value)))
            throw ConvergenceError("top_eigenpairs: residual above target after refinement",
                                   p.value, p.residual);
    return spec;
}

Spectrum full_eigendecomposition(const SymmetricMatrix& a, double tol) {
    const int n = a.size();
    const double norm_a = frobenius_norm(a);
    const double off_threshold = 1e-11 * norm_a;
    constexpr int kMaxSweeps = 30;

    std::vector<double> w(a.data());
    std::vector<double> vmat(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) vmat[static_cast<std::size_t>(i) * n + i] = 1.0;
    auto W = [&](int i, int j) -> double& { return w[static_cast<std::size_t>(i) * n + j]; };
    auto V = [&](int i, int j) -> double& { return vmat[static_cast<std::size_t>(i) * n + j]; };

    auto off_norm = [&] {
        double s = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) s += 2.0 * W(p, q) * W(p, q);
        return std::sqrt(s);
    };

    bool done = off_norm() <= off_threshold;
    for (int sweep = 0; sweep < kMaxSweeps && !done; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = W(p, q);
                if (apq == 0.0) continue;
                const double theta = (W(q, q) - W(p, p)) / (2.0 * apq);
                double t = 1.0 / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
                if (theta < 0.0) t = -t;
                const double cr = 1.0 / std::sqrt(1.0 + t * t);
                const double sr = t * cr;

                const double app = W(p, p), aqq = W(q, q);
                W(p, p) = app - t * apq;
                W(q, q) = aqq + t * apq;
                W(p, q) = W(q, p) = 0.0;
                for (int i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = W(i, p), aiq = W(i, q);
                    W(i, p) = W(p, i) = cr * aip - sr * aiq;
                    W(i, q) = W(q, i) = sr * aip + cr * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = V(i, p), viq = V(i, q);
                    V(i, p) = cr * vip - sr * viq;
                    V(i, q) = sr * vip + cr * viq;
                }
            }
        }
        done = off_norm() <= off_threshold;
    }
    if (!done)
        throw ConvergenceError("Jacobi sweep cap reached before off-diagonal target",
                               0.0, off_norm());

    Spectrum spec;
    spec.tolerance = tol;
    spec.pairs.resize(n);
    for (int j = 0; j < n; ++j) {
        EigenPair& p = spec.pairs[j];
        p.value = W(j, j);
        p.vector.resize(n);
        for (int i = 0; i < n; ++i) p.vector[i] = V(i, j);
        p.residual = honest_residual(a, p.vector, p.value);
    }
    std::stable_sort(spec.pairs.begin(), spec.pairs.end(),
                     [](const EigenPair& x, const EigenPair& y) { return x.value > y.value; });

    // Reconstruction residual ||A - V L V^T||_F.
    double rec = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (const auto& p : spec.pairs) s += p.value * p.vector[i] * p.vector[j];
            const double d = a(i, j) - s;
            rec += (i == j ? 1.0 : 2.0) * d * d;
        }
    }
    if (std::sqrt(rec) > tol * std::max(norm_a, 1e-300))
        throw ConvergenceError("Jacobi reconstruction residual above tolerance",
                               0.0, std::sqrt(rec));
    return spec;
}

SymmetricMatrix submatrix(const SymmetricMatrix& a, std::span<const int> rows,
                          std::span<const int> cols) {
    if (rows.empty() || cols.empty())
        throw std::invalid_argument("submatrix: index sets must be nonempty");
    const int n = a.size();
    for (int r : rows)
        if (r < 0 || r >= n) throw std::out_of_range("submatrix: row index out of bounds");
    for (int c : cols)
        if (c < 0 || c >= n) throw std::out_of_range("submatrix: column index out of bounds");
    if (rows.size() != cols.size() || !std::equal(rows.begin(), rows.end(), cols.begin()))
        throw std::invalid_argument("submatrix: rows and cols must match for a symmetric restriction");

    const int m = static_cast<int>(rows.size());
    SymmetricMatrix out(m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) out.set(i, j, a(rows[i], cols[j]));
    return out;
}

double infty_to_one_bruteforce(const SymmetricMatrix& a) {
    const int n = a.size();
    if (n > 16)
        throw std::invalid_argument("infty_to_one_bruteforce: n > 16 exceeds the enumeration guard");

    // Fix x_0 = +1 (the norm is invariant under x -> -x) and choose each y_j
    // coordinatewise as sign((x^T A)_j).
    double best = 0.0;
    std::vector<double> x(n, 1.0);
    const std::uint64_t lim = 1ULL << (n - 1);
    for (std::uint64_t mask = 0; mask < lim; ++mask) {
        for (int i = 1; i < n; ++i) x[i] = (mask >> (i - 1)) & 1 ? -1.0 : 1.0;
        double val = 0.0;
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += x[i] * a(i, j);
            val += std::fabs(s);
        }
        best = std::max(best, val);
    }
    return best;
}

} // namespace ccr
