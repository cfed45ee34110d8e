#include "ccr/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ccr {

void SdpOptions::validate() const {
    if (rank_r < 0) throw std::invalid_argument("SdpOptions: rank_r must be >= 0");
    if (max_iters < 1) throw std::invalid_argument("SdpOptions: max_iters must be >= 1");
    if (restarts < 1) throw std::invalid_argument("SdpOptions: restarts must be >= 1");
    if (!(step_size > 0.0) || !(step_decay > 0.0 && step_decay <= 1.0))
        throw std::invalid_argument("SdpOptions: bad step schedule");
    if (zero_sum_penalty_mu.empty())
        throw std::invalid_argument("SdpOptions: empty penalty schedule");
}

namespace {

int effective_rank(int n, const SdpOptions& opts) {
    if (opts.rank_r > 0) return std::min(opts.rank_r, n);
    const int r = static_cast<int>(std::ceil(std::sqrt(2.0 * n))) + 1;
    return std::min(r, n);
}

// W = Q * U for a row-major n x r factor.
void gemm_sym(const SymmetricMatrix& q, const std::vector<double>& u, int r,
              std::vector<double>& w) {
    const int n = q.size();
    std::fill(w.begin(), w.end(), 0.0);
    const double* qrow = q.data().data();
    for (int i = 0; i < n; ++i, qrow += n) {
        double* wi = &w[static_cast<std::size_t>(i) * r];
        for (int j = 0; j < n; ++j) {
            const double qij = qrow[j];
            if (qij == 0.0) continue;
            const double* uj = &u[static_cast<std::size_t>(j) * r];
            for (int c = 0; c < r; ++c) wi[c] += qij * uj[c];
        }
    }
}

double frob_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void normalize_rows(std::vector<double>& u, int n, int r, SplitMix64& rng) {
    for (int i = 0; i < n; ++i) {
        double* row = &u[static_cast<std::size_t>(i) * r];
        double s = 0.0;
        for (int c = 0; c < r; ++c) s += row[c] * row[c];
        if (s < 1e-280) {
            for (int c = 0; c < r; ++c) row[c] = rng.next_double() - 0.5;
            s = 0.0;
            for (int c = 0; c < r; ++c) s += row[c] * row[c];
        }
        const double inv = 1.0 / std::sqrt(s);
        for (int c = 0; c < r; ++c) row[c] *= inv;
    }
}

struct AscentOutcome {
    std::vector<double> factor;
    double objective = -std::numeric_limits<double>::infinity(); // unpenalized Q . X
    double penalized = -std::numeric_limits<double>::infinity();
    double zero_sum = 0.0; // ||sum_i u_i||^2 == X . ones
    long long iterations = 0;
    bool plateaued = false; // final penalty round ended on the plateau rule
};

AscentOutcome ascend(const SymmetricMatrix& q, int r, const SdpOptions& opts,
                     const std::vector<double>& mus, SplitMix64 rng) {
    const int n = q.size();
    std::vector<double> u(static_cast<std::size_t>(n) * r);
    for (auto& v : u) v = rng.next_double() - 0.5;
    normalize_rows(u, n, r, rng);

    std::vector<double> w(u.size());
    std::vector<double> grad(u.size());
    std::vector<double> colsum(r);
    AscentOutcome out;

    for (double mu : mus) {
        double eta = opts.step_size;
        double prev = std::numeric_limits<double>::infinity();
        int plateau = 0;
        out.plateaued = false;
        for (int it = 0; it < opts.max_iters; ++it) {
            ++out.iterations;
            gemm_sym(q, u, r, w);
            const double obj = frob_dot(u, w);

            double pen_obj = obj;
            if (mu != 0.0) {
                std::fill(colsum.begin(), colsum.end(), 0.0);
                for (int i = 0; i < n; ++i)
                    for (int c = 0; c < r; ++c) colsum[c] += u[static_cast<std::size_t>(i) * r + c];
                double s2 = 0.0;
                for (int c = 0; c < r; ++c) s2 += colsum[c] * colsum[c];
                pen_obj -= mu * s2;
            }

            if (std::fabs(pen_obj - prev) <= opts.convergence_tol * std::max(1.0, std::fabs(pen_obj))) {
                if (++plateau >= opts.plateau_iters) {
                    out.plateaued = true;
                    break;
                }
            } else {
                plateau = 0;
            }
            prev = pen_obj;

            for (std::size_t idx = 0; idx < u.size(); ++idx) grad[idx] = 2.0 * w[idx];
            if (mu != 0.0) {
                for (int i = 0; i < n; ++i)
                    for (int c = 0; c < r; ++c)
                        grad[static_cast<std::size_t>(i) * r + c] -= 2.0 * mu * colsum[c];
            }
            const double gn = std::sqrt(frob_dot(grad, grad));
            if (gn < 1e-14) {
                out.plateaued = true;
                break;
            }
            const double step = eta / gn;
            for (std::size_t idx = 0; idx < u.size(); ++idx) u[idx] += step * grad[idx];
            normalize_rows(u, n, r, rng);
            eta *= opts.step_decay;
        }
        // A schedule decayed by two-plus orders of magnitude has converged in
        // the sense that the remaining total movement is negligible.
        if (eta <= opts.step_size / 400.0) out.plateaued = true;
    }

    gemm_sym(q, u, r, w);
    out.objective = frob_dot(u, w);
    std::fill(colsum.begin(), colsum.end(), 0.0);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < r; ++c) colsum[c] += u[static_cast<std::size_t>(i) * r + c];
    out.zero_sum = frob_dot(colsum, colsum);
    out.penalized = out.objective - (mus.back() != 0.0 ? mus.back() * out.zero_sum : 0.0);
    out.factor = std::move(u);
    return out;
}

SdpSolution solve_core(const SymmetricMatrix& q, const SdpOptions& opts, SplitMix64& rng,
                       bool zero_sum) {
    opts.validate();
    const int n = q.size();
    const int r = effective_rank(n, opts);

    std::vector<double> mus{0.0};
    if (zero_sum) {
        const double scale = frobenius_norm(q) / n;
        mus.clear();
        for (double m : opts.zero_sum_penalty_mu) mus.push_back(m * scale);
    }

    SdpSolution sol;
    sol.rank_r = r;
    sol.restarts_used = opts.restarts;
    AscentOutcome best;
    bool have = false;
    bool any_plateaued = false;
    for (int restart = 0; restart < opts.restarts; ++restart) {
        AscentOutcome cur = ascend(q, r, opts, mus, rng.split());
        sol.iterations += cur.iterations;
        any_plateaued = any_plateaued || cur.plateaued;
        const bool better = !have || (zero_sum ? cur.penalized > best.penalized
                                               : cur.objective > best.objective);
        if (better) {
            best = std::move(cur);
            sol.best_restart = restart;
            have = true;
        }
    }

    sol.X = SymmetricMatrix(n);
    for (int i = 0; i < n; ++i) {
        const double* ui = &best.factor[static_cast<std::size_t>(i) * r];
        for (int j = i; j < n; ++j) {
            const double* uj = &best.factor[static_cast<std::size_t>(j) * r];
            double s = 0.0;
            for (int c = 0; c < r; ++c) s += ui[c] * uj[c];
            sol.X.set(i, j, s);
        }
    }
    double value = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) value += q(i, j) * sol.X(i, j);
    sol.value = value;
    sol.factor = std::move(best.factor);

    if (!any_plateaued)
        throw SdpNoConvergence("sdp ascent: no restart converged within max_iters", sol);
    if (zero_sum) {
        const double violation = std::fabs(best.zero_sum);
        if (violation > opts.zero_sum_tolerance * static_cast<double>(n) * n)
            throw SdpNoConvergence(
                "zero-sum constraint violated after the final penalty round: |X.1| = " +
                    std::to_string(violation),
                sol);
    }
    return sol;
}

// Unrestricted two-factor ascent for max sum_ij A_ij <u_i, v_j>.
double bilinear_ascent(const SymmetricMatrix& a, int r, const SdpOptions& opts, SplitMix64 rng) {
    const int n = a.size();
    std::vector<double> u(static_cast<std::size_t>(n) * r), v(u.size());
    double best = -std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < opts.restarts; ++restart) {
        SplitMix64 stream = rng.split();
        for (auto& x : u) x = stream.next_double() - 0.5;
        for (auto& x : v) x = stream.next_double() - 0.5;
        normalize_rows(u, n, r, stream);
        normalize_rows(v, n, r, stream);
        std::vector<double> av(u.size()), au(u.size()), grad(2 * u.size());
        double eta = opts.step_size;
        double prev = std::numeric_limits<double>::infinity();
        int plateau = 0;
        for (int it = 0; it < opts.max_iters; ++it) {
            gemm_sym(a, v, r, av); // grad wrt u
            gemm_sym(a, u, r, au); // grad wrt v (A symmetric)
            const double obj = frob_dot(u, av);
            if (std::fabs(obj - prev) <= opts.convergence_tol * std::max(1.0, std::fabs(obj))) {
                if (++plateau >= opts.plateau_iters) break;
            } else {
                plateau = 0;
            }
            prev = obj;
            double gn = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                grad[i] = av[i];
                grad[u.size() + i] = au[i];
                gn += av[i] * av[i] + au[i] * au[i];
            }
            gn = std::sqrt(gn);
            if (gn < 1e-14) break;
            const double step = eta / gn;
            for (std::size_t i = 0; i < u.size(); ++i) {
                u[i] += step * grad[i];
                v[i] += step * grad[u.size() + i];
            }
            normalize_rows(u, n, r, stream);
            normalize_rows(v, n, r, stream);
            eta *= opts.step_decay;
        }
        gemm_sym(a, v, r, av);
        best = std::max(best, frob_dot(u, av));
    }
    return best;
}

} // namespace

SdpSolution solve_sdp_norm(const SymmetricMatrix& q, const SdpOptions& opts, SplitMix64& rng) {
    return solve_core(q, opts, rng, false);
}

SdpSolution solve_sdp_norm_zerosum(const SymmetricMatrix& q, const SdpOptions& opts,
                                   SplitMix64& rng) {
    return solve_core(q, opts, rng, true);
}

Vector sample_eigenvector(const SdpSolution& sol, SplitMix64& rng) {
    const Spectrum spec = full_eigendecomposition(sol.X, 1e-6);
    double total = 0.0;
    for (const auto& p : spec.pairs) total += std::max(p.value, 0.0);
    if (total <= 0.0)
        throw std::runtime_error("sample_eigenvector: no positive eigenvalue to sample");
    const double draw = rng.next_double() * total;
    double acc = 0.0;
    for (const auto& p : spec.pairs) {
        acc += std::max(p.value, 0.0);
        if (draw < acc) return p.vector;
    }
    return spec.pairs.back().vector; // rounding fallthrough
}

GrothendieckBracket grothendieck_bracket(const SymmetricMatrix& a, const SdpOptions& opts,
                                         SplitMix64& rng) {
    GrothendieckBracket out;
    const double fro = frobenius_norm(a);
    if (fro == 0.0) return out;

    double value = solve_sdp_norm(a, opts, rng).value;

    // lambda_min(A) = -lambda_max(-A); run the two-factor ascent only when the
    // symmetric restriction x = y may undershoot.
    const int n = a.size();
    SymmetricMatrix neg(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) neg.set(i, j, -a(i, j));
    const std::vector<EigenPair> none;
    const double neg_top =
        power_iterate(neg, fro, none, 1e-6, 100000, true, 1e-6, 0x6b0ULL).value;
    if (neg_top > 1e-9 * std::max(1.0, fro)) {
        const int r = effective_rank(n, opts);
        value = std::max(value, bilinear_ascent(a, r, opts, rng.split()));
    }

    out.sdp_value = value;
    out.lower = value / 1.783;
    out.upper = value;
    return out;
}

} // namespace ccr
