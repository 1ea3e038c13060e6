#pragma once

#include <span>
#include <string>
#include <vector>

#include "gtreg/dictionary.hpp"
#include "gtreg/linalg.hpp"

namespace gtreg {

struct SolverConfig {
    int max_iter = 200;
    double grad_tol = 1e-8;          // sup-norm of the mean score
    double boundary_fraction = 0.99;  // fraction-to-boundary step cap
    double armijo_c = 1e-4;
    double backtrack_ratio = 0.5;
    void validate() const;
};

/// Derivative-positivity constraint b't(x,y) >= eps at one point
/// (standardized coordinates), used by the QGM repair loop.
struct ConstraintPoint {
    Vector x;
    double y = 0.0;
    double eps = 1e-3;
};

struct FitResult {
    Vector b_hat;
    double value = 0.0;       // Q_n at b_hat (mean scale)
    double score_norm = 0.0;  // sup-norm of the mean score at b_hat
    int iterations = 0;
    bool converged = false;
    std::vector<ConstraintPoint> constraints_added;
    bool qgm_ok = true;
    // diagnostics
    double design_min_eig = 0.0;
    double design_max_eig = 0.0;
    bool gradient_fallback_used = false;
    std::vector<std::string> notes;
    Vector value_trace;  // objective after each accepted step
};

struct PenalizedFit {
    Vector b_al;
    double lambda = 0.0;  // sum-scale penalty level (multiplies the summed likelihood)
    Vector weights;       // adaptive weights w_l, zero on the unpenalized set
    std::vector<int> active_set;
    double kkt_residual = 0.0;  // sum-scale stationarity residual
    double bic = 0.0;
    bool qgm_ok = true;  // set by the model-selection QGM screen
    bool converged = false;
    double value = 0.0;  // Q_n at b_al (mean scale, unpenalized)
    int iterations = 0;
};

/// Canonical start: unit coefficient on the pure-Y column, zero elsewhere.
/// Feasible for every dictionary (b't = 1 identically).
Vector initial_point(const DesignMatrices& d);

/// Damped Newton ascent of Q_n over the effective domain: full Newton step,
/// fraction-to-boundary cap, Armijo backtracking. Deterministic.
FitResult fit_ml(const DesignMatrices& d, const SolverConfig& cfg = {});

/// Same, from a caller-supplied feasible start.
FitResult fit_ml_from(const DesignMatrices& d, const SolverConfig& cfg, const Vector& start);

/// Maximizes Q_n subject to b't(x_c,y_c) >= eps_c via an auxiliary log
/// barrier driven to zero over a continuation schedule. With an empty
/// constraint list this is exactly fit_ml.
FitResult fit_ml_constrained(const DesignMatrices& d, const SolverConfig& cfg,
                             const std::vector<ConstraintPoint>& constraints,
                             const Dictionary& dict);

/// Constraint rows given directly as dictionary derivative evaluations.
FitResult fit_ml_constrained_rows(const DesignMatrices& d, const SolverConfig& cfg,
                                  const Matrix& t_rows, const Vector& eps);

/// Adaptive weights from a first-step fit: 1/|b_l| for nonzero b_l, zero on
/// zeros and on the unpenalized index set.
Vector adaptive_weights(const FitResult& first_step, std::span<const int> unpenalized);

/// Unpenalized coordinates: the intercept (1*1) and pure-Y (1*Y) columns.
std::vector<int> default_unpenalized();

/// Proximal Newton for max_b  sum_i loglik_i(b) - lambda * sum_l w_l |b_l|.
/// `lambda` is sum-scale (the lambda_n multiplying the summed likelihood);
/// per-observation grid values must be multiplied by n first.
PenalizedFit fit_adaptive_lasso(const DesignMatrices& d, const SolverConfig& cfg,
                                const FitResult& first_step, double lambda,
                                std::span<const int> unpenalized);

}  // namespace gtreg
