#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccr {

using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vector& a);

// Dense symmetric n x n matrix, row-major. Symmetry is an invariant: set()
// writes both mirror entries and from_entries() rejects asymmetric input.
class SymmetricMatrix {
public:
    explicit SymmetricMatrix(int n);

    // Validates |a_ij - a_ji| <= 1e-12 and copies the upper triangle onto the
    // lower one so the stored matrix is exactly symmetric.
    static SymmetricMatrix from_entries(int n, std::vector<double> entries);

    int size() const { return n_; }

    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    void set(int i, int j, double v) {
        a_[static_cast<std::size_t>(i) * n_ + j] = v;
        a_[static_cast<std::size_t>(j) * n_ + i] = v;
    }

    const std::vector<double>& data() const { return a_; }

    Vector multiply(const Vector& x) const;
    double trace() const;

private:
    int n_;
    std::vector<double> a_;
};

struct EigenPair {
    double value = 0.0;
    Vector vector;
    double residual = 0.0; // achieved ||A v - value v||_2
};

// Eigenpairs sorted by algebraic value, descending. `tolerance` is the
// residual target the solver was asked for.
struct Spectrum {
    std::vector<EigenPair> pairs;
    double tolerance = 0.0;
};

struct ConvergenceError : std::runtime_error {
    double best_value;
    double best_residual;
    ConvergenceError(const std::string& what, double value, double residual)
        : std::runtime_error(what), best_value(value), best_residual(residual) {}
};

double frobenius_norm(const SymmetricMatrix& a);

// Largest |eigenvalue| via shifted power iteration on A + cI and cI - A with
// c = ||A||_F. Stops on the residual target or on value stagnation at the
// caller's tolerance; throws ConvergenceError when max_iter runs out first.
double operator_norm(const SymmetricMatrix& a, double tol = 1e-9, int max_iter = 200000);

// The m algebraically largest eigenpairs by power iteration with deflation on
// the shifted matrix A + cI, c = ||A||_F. Every returned pair satisfies
// residual <= tol * max(1, |value|); anything less is a ConvergenceError.
Spectrum top_eigenpairs(const SymmetricMatrix& a, int m, double tol = 1e-9, int max_iter = 200000);

// All n eigenpairs by cyclic Jacobi rotations (30-sweep cap, off-diagonal
// threshold 1e-11 * ||A||_F), verified against ||A - V L V^T||_F <= tol*||A||_F.
Spectrum full_eigendecomposition(const SymmetricMatrix& a, double tol = 1e-8);

// Principal restriction A^{S,S}. Both index spans must name the same rows so
// the result stays symmetric; out-of-bounds or empty sets are errors.
SymmetricMatrix submatrix(const SymmetricMatrix& a, std::span<const int> rows, std::span<const int> cols);

// Exact max_{x,y in {-1,+1}^n} |x^T A y|, enumerating x and choosing y
// coordinatewise. Guarded to n <= 16.
double infty_to_one_bruteforce(const SymmetricMatrix& a);

// Deflated power-iteration step shared by top_eigenpairs, operator_norm and
// the spectral k-detector. Finds the top eigenpair of A restricted to the
// orthogonal complement of `deflated`, working on A + shift*I.
struct PowerIterationResult {
    double value = 0.0;
    Vector vector;
    double residual = 0.0;
    bool converged = false; // residual target met (false on value stagnation)
    int iterations = 0;
};

PowerIterationResult power_iterate(const SymmetricMatrix& a, double shift,
                                   const std::vector<EigenPair>& deflated,
                                   double tol, int max_iter,
                                   bool allow_value_plateau, double plateau_tol,
                                   std::uint64_t salt,
                                   const Vector* warm_start = nullptr);

// Rayleigh-Ritz finish for a deflation run: re-orthonormalizes the vectors,
// diagonalizes the projected matrix and rotates, which removes the
// contamination earlier inexact pairs leave in later ones. Pairs come back
// sorted by value descending with honest residuals.
void rayleigh_ritz_refine(const SymmetricMatrix& a, std::vector<EigenPair>& pairs);

} // namespace ccr
