#pragma once

#include <vector>

#include "ccr/matrix.hpp"
#include "ccr/rng.hpp"

namespace ccr {

struct SdpOptions {
    int rank_r = 0;            // 0 means ceil(sqrt(2n)) + 1
    int max_iters = 6000;      // per penalty round and restart
    double step_size = 0.1;    // normalized ascent step eta0 / ||grad||
    double step_decay = 0.999; // geometric decay per iteration
    double convergence_tol = 1e-7;
    int plateau_iters = 50;    // consecutive small relative changes to stop
    int restarts = 3;
    std::vector<double> zero_sum_penalty_mu = {1.0, 10.0, 100.0}; // times ||Q||_F / n
    double zero_sum_tolerance = 1e-3; // |X . ones| <= tol * n^2

    void validate() const;
};

// Solution of the vector program max sum_ij Q_ij <x_i, x_j> over unit vectors,
// as a rank-r factor and its Gram matrix X (unit diagonal, PSD, trace n).
struct SdpSolution {
    SymmetricMatrix X;
    double value = 0.0;          // Q . X
    std::vector<double> factor;  // n x r, row-major, unit rows
    int rank_r = 0;
    long long iterations = 0;
    int restarts_used = 0;
    int best_restart = 0;

    SdpSolution() : X(1) {}
};

// Projected gradient ascent on the row-normalized factor; returns the best of
// `restarts` runs. Q must be symmetric (guaranteed by the type). Throws
// SdpNoConvergence when no restart reaches the relative-change plateau.
SdpSolution solve_sdp_norm(const SymmetricMatrix& q, const SdpOptions& opts, SplitMix64& rng);

// Same ascent with a quadratic penalty mu * ||sum_i x_i||^2 enforcing the
// zero-sum constraint sum_ij <x_i, x_j> = 0; mu grows geometrically across
// warm-started rounds. Throws if the final violation exceeds the tolerance.
SdpSolution solve_sdp_norm_zerosum(const SymmetricMatrix& q, const SdpOptions& opts,
                                   SplitMix64& rng);

// Draws one eigenvector of X with probability lambda_i / sum(lambda), negative
// eigenvalues clamped to zero. Errors when no eigenvalue is positive.
Vector sample_eigenvector(const SdpSolution& sol, SplitMix64& rng);

struct GrothendieckBracket {
    double sdp_value = 0.0;
    double lower = 0.0; // sdp_value / 1.783
    double upper = 0.0; // sdp_value
};

// SDP-norm estimate together with the bracket it implies for the infinity-to-1
// norm. For indefinite inputs the symmetric restriction x = y can undershoot,
// so an unrestricted two-factor ascent is run as well and the max is kept.
GrothendieckBracket grothendieck_bracket(const SymmetricMatrix& a, const SdpOptions& opts,
                                         SplitMix64& rng);

struct SdpNoConvergence : std::runtime_error {
    SdpSolution best_effort;
    SdpNoConvergence(const std::string& what, SdpSolution sol)
        : std::runtime_error(what), best_effort(std::move(sol)) {}
};

} // namespace ccr
