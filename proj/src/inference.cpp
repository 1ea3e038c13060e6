#include "gtreg/inference.hpp"

#include <cmath>

#include "gtreg/errors.hpp"
#include "gtreg/kernels.hpp"
#include "gtreg/objective.hpp"

namespace gtreg {

Matrix Sandwich::full_cov(int jk) const {
    if (which == CovScope::full) return cov;
    Matrix out(jk, jk);
    for (std::size_t a = 0; a < active.size(); ++a)
        for (std::size_t b = 0; b < active.size(); ++b)
            out(active[a], active[b]) = cov(int(a), int(b));
    return out;
}

namespace {

// psi rows: psi_i = -T_i e_i + t_i / eta_i
Matrix psi_rows(const DesignMatrices& d, const Vector& e, const Vector& eta) {
    Matrix rows(d.n, d.jk);
    for (int i = 0; i < d.n; ++i) {
        const double* Ti = d.T.row(i);
        const double* ti = d.t.row(i);
        double* out = rows.row(i);
        const double inv = 1.0 / eta[i];
        for (int l = 0; l < d.jk; ++l) out[l] = -Ti[l] * e[i] + ti[l] * inv;
    }
    return rows;
}

Sandwich build_sandwich(const Vector& b, const DesignMatrices& d, const std::vector<int>& active,
                        CovScope scope) {
    LikelihoodReport rep = evaluate(b, d);
    const int n = d.n;
    const Matrix psi = psi_rows(d, rep.e, rep.eta);
    Vector w(n, 1.0 / n);
    Matrix psi_full(d.jk, d.jk);
    kernels::weighted_gram(psi.data(), n, d.jk, w.data(), psi_full.data());

    Sandwich s;
    s.which = scope;
    s.active = active;
    const int p = int(active.size());
    s.gamma_hat = Matrix(p, p);
    s.psi_hat = Matrix(p, p);
    for (int a = 0; a < p; ++a)
        for (int c = 0; c < p; ++c) {
            s.gamma_hat(a, c) = rep.hessian(active[a], active[c]);
            s.psi_hat(a, c) = psi_full(active[a], active[c]);
        }

    // invert -gamma (SPD when the design block is nonsingular); fall back to
    // a pseudo-inverse when the block is numerically singular
    Matrix neg(p, p);
    for (int a = 0; a < p; ++a)
        for (int c = 0; c < p; ++c) neg(a, c) = -s.gamma_hat(a, c);
    Matrix inv(p, p);
    Matrix chol = neg;
    if (cholesky(chol)) {
        for (int c = 0; c < p; ++c) {
            Vector col(p, 0.0);
            col[c] = 1.0;
            cholesky_solve(chol, col);
            for (int r = 0; r < p; ++r) inv(r, c) = col[r];
        }
    } else {
        bool truncated = false;
        inv = pinv_sym(neg, 1e-12, &truncated);
        s.pseudo_inverse_used = true;
    }
    // cov = inv * psi * inv / n  (inv symmetric)
    Matrix tmp = mat_mul(inv, s.psi_hat);
    s.cov = mat_mul(tmp, inv);
    for (int a = 0; a < p; ++a)
        for (int c = 0; c < p; ++c) s.cov(a, c) /= n;
    s.std_errors.resize(p);
    for (int a = 0; a < p; ++a) s.std_errors[a] = std::sqrt(std::max(0.0, s.cov(a, a)));
    return s;
}

}  // namespace

Sandwich sandwich(const Vector& b, const DesignMatrices& d) {
    std::vector<int> all(d.jk);
    for (int l = 0; l < d.jk; ++l) all[l] = l;
    return build_sandwich(b, d, all, CovScope::full);
}

Sandwich sandwich(const FitResult& fit, const DesignMatrices& d) {
    if (!fit.converged) throw SpecError("sandwich requires a converged fit");
    return sandwich(fit.b_hat, d);
}

Sandwich sandwich(const PenalizedFit& pfit, const DesignMatrices& d) {
    if (!pfit.converged) throw SpecError("sandwich requires a converged fit");
    if (int(pfit.active_set.size()) == d.jk) {
        Sandwich s = sandwich(pfit.b_al, d);
        return s;
    }
    return build_sandwich(pfit.b_al, d, pfit.active_set, CovScope::active_block);
}

SteinReport stein_moments(const Matrix& t_probe, const Matrix& tder_probe, const Vector& e_hat) {
    const int n = t_probe.rows(), m = t_probe.cols();
    if (tder_probe.rows() != n || tder_probe.cols() != m || int(e_hat.size()) != n)
        throw DimensionError("probe matrices do not align");
    SteinReport rep;
    rep.moments.assign(m, 0.0);
    rep.studentized.assign(m, 0.0);
    Vector sumsq(m, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* Ti = t_probe.row(i);
        const double* ti = tder_probe.row(i);
        for (int l = 0; l < m; ++l) {
            const double s = -Ti[l] * e_hat[i] + ti[l];
            rep.moments[l] += s;
            sumsq[l] += s * s;
        }
    }
    for (int l = 0; l < m; ++l) {
        rep.moments[l] /= n;
        const double var = sumsq[l] / n - rep.moments[l] * rep.moments[l];
        const double se = std::sqrt(std::max(var, 1e-300) / n);
        rep.studentized[l] = rep.moments[l] / se;
    }
    return rep;
}

SteinReport stein_diagnostics(const FitResult& fit, const DesignMatrices& d, const DataSet& data,
                              const DictionarySpec& probe_spec) {
    if (!fit.converged) throw SpecError("diagnostics require a converged fit");
    Vector e(d.n);
    kernels::rowwise_dot(d.T.data(), d.n, d.jk, fit.b_hat.data(), e.data());

    DataSet probe_data;
    probe_data.y = e;
    probe_data.x = data.x;
    DictionarySpec spec = probe_spec;
    spec.standardize = false;  // keep the derivative exactly d/de
    BuildResult probe = build_dictionary(spec, probe_data);
    return stein_moments(probe.design.T, probe.design.t, e);
}

double info_matrix_gap(const Vector& b, const DesignMatrices& d) {
    Sandwich s = sandwich(b, d);
    Matrix sum(d.jk, d.jk);
    for (int i = 0; i < d.jk; ++i)
        for (int j = 0; j < d.jk; ++j) sum(i, j) = s.gamma_hat(i, j) + s.psi_hat(i, j);
    return frobenius_norm(sum) / frobenius_norm(s.psi_hat);
}

}  // namespace gtreg
