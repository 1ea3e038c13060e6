#pragma once

#include <vector>

#include "gtreg/dictionary.hpp"
#include "gtreg/solver.hpp"

namespace gtreg {

/// Dual variables recovered in closed form from a primal solution:
/// u_i = b'T_i, v_i = -1/(b't_i). The dual program is never solved; the
/// certificate checks strong duality and the dual constraints (the score
/// equations) at the reported solution.
struct DualCertificate {
    Vector u;
    Vector v;  // all strictly negative
    double dual_value = 0.0;
    double primal_value = 0.0;  // n * Q_n(b)
    double gap = 0.0;           // |primal - dual|
    double constraint_residual = 0.0;  // sup-norm of sum_i {T_i u_i + t_i v_i}
};

DualCertificate recover_dual(const FitResult& fit, const DesignMatrices& d);
DualCertificate recover_dual(const Vector& b, const DesignMatrices& d);

/// Per-coordinate check of the dual adaptive-Lasso box constraints
///   |sum_i {T_il u_i + t_il v_i}| <= lambda * w_l      (all l)
/// with equality (complementary slackness) at active penalized coordinates.
struct LassoKktReport {
    Vector residual;  // |sum_i {T_il u_i + t_il v_i}|
    Vector bound;     // lambda * w_l
    bool pass = false;
    double tol = 0.0;
    std::vector<int> violations;
};

LassoKktReport check_lasso_kkt(const PenalizedFit& pfit, const DesignMatrices& d, double tol);

}  // namespace gtreg
