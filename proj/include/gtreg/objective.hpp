#pragma once

#include <span>

#include "gtreg/dictionary.hpp"
#include "gtreg/linalg.hpp"

namespace gtreg {

/// Sample likelihood report at a feasible coefficient vector:
///   value   = -log(2*pi)/2 - mean(e_i^2)/2 + mean(log eta_i)
///   score   = mean_i { -T_i e_i + t_i / eta_i }
///   hessian = mean_i { -T_i T_i' - t_i t_i' / eta_i^2 }
/// with e_i = b'T_i, eta_i = b't_i. The Hessian is symmetric negative
/// definite whenever sum T_i T_i' is nonsingular.
struct LikelihoodReport {
    double value = 0.0;
    Vector score;
    Matrix hessian;
    Vector e;
    Vector eta;
};

/// True iff min_i b't_i > 0 strictly (b inside the effective domain).
bool in_domain(std::span<const double> b, const DesignMatrices& d);

/// Full report; throws DomainError naming the first offending row.
LikelihoodReport evaluate(std::span<const double> b, const DesignMatrices& d);

/// Value only (line-search fast path); throws DomainError when infeasible.
/// Optionally exposes the fitted e and eta vectors.
double evaluate_value(std::span<const double> b, const DesignMatrices& d, Vector* e_out = nullptr,
                      Vector* eta_out = nullptr);

/// Value if feasible; quiet infeasibility signal for line searches.
bool try_evaluate_value(std::span<const double> b, const DesignMatrices& d, double& value);

/// Q_n(b) - lambda * sum_l weights[l] * |b_l|. `lambda` here pairs directly
/// with the mean-scale Q_n; the solver's path parameter is sum-scale (see
/// fit_adaptive_lasso).
double penalized_value(std::span<const double> b, const DesignMatrices& d, double lambda,
                       std::span<const double> weights);

}  // namespace gtreg
