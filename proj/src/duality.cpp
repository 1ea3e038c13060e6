#include "gtreg/duality.hpp"

#include <cmath>

#include "gtreg/errors.hpp"
#include "gtreg/gauss.hpp"
#include "gtreg/kernels.hpp"
#include "gtreg/objective.hpp"

namespace gtreg {

DualCertificate recover_dual(const Vector& b, const DesignMatrices& d) {
    const int n = d.n, m = d.jk;
    DualCertificate cert;
    Vector e, eta;
    const double qn = evaluate_value(b, d, &e, &eta);  // throws if any eta <= 0

    cert.u = std::move(e);
    cert.v.resize(n);
    for (int i = 0; i < n; ++i) cert.v[i] = -1.0 / eta[i];

    cert.primal_value = n * qn;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += 0.5 * cert.u[i] * cert.u[i] - std::log(-cert.v[i]);
    cert.dual_value = -n * (0.5 * kLog2Pi + 1.0) + s;
    cert.gap = std::abs(cert.primal_value - cert.dual_value);

    // sum_i {T_i u_i + t_i v_i} = -(summed score)
    Vector r(m, 0.0), tmp(m);
    kernels::weighted_colsum(d.T.data(), n, m, cert.u.data(), r.data());
    kernels::weighted_colsum(d.t.data(), n, m, cert.v.data(), tmp.data());
    for (int l = 0; l < m; ++l) r[l] += tmp[l];
    cert.constraint_residual = norm_inf(r);
    return cert;
}

DualCertificate recover_dual(const FitResult& fit, const DesignMatrices& d) {
    if (!fit.converged) throw SpecError("dual recovery requires a converged fit");
    return recover_dual(fit.b_hat, d);
}

LassoKktReport check_lasso_kkt(const PenalizedFit& pfit, const DesignMatrices& d, double tol) {
    if (pfit.weights.empty()) throw SpecError("penalized fit carries no weights");
    const int m = d.jk;
    DualCertificate cert = recover_dual(pfit.b_al, d);

    Vector r(m, 0.0), tmp(m);
    kernels::weighted_colsum(d.T.data(), d.n, m, cert.u.data(), r.data());
    kernels::weighted_colsum(d.t.data(), d.n, m, cert.v.data(), tmp.data());

    LassoKktReport rep;
    rep.tol = tol;
    rep.residual.resize(m);
    rep.bound.resize(m);
    bool ok = true;
    for (int l = 0; l < m; ++l) {
        rep.residual[l] = std::abs(r[l] + tmp[l]);
        rep.bound[l] = pfit.lambda * pfit.weights[l];
        bool bad = rep.residual[l] > rep.bound[l] + tol;
        // complementary slackness: active penalized coordinates sit on the box
        if (pfit.b_al[l] != 0.0 && pfit.weights[l] > 0.0)
            bad = bad || rep.residual[l] < rep.bound[l] - tol;
        if (bad) {
            ok = false;
            rep.violations.push_back(l);
        }
    }
    rep.pass = ok;
    return rep;
}

}  // namespace gtreg
