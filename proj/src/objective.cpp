#include "gtreg/objective.hpp"

#include <cmath>

#include "gtreg/errors.hpp"
#include "gtreg/gauss.hpp"
#include "gtreg/kernels.hpp"

namespace gtreg {

namespace {

void check_dims(std::span<const double> b, const DesignMatrices& d) {
    if (int(b.size()) != d.jk) throw DimensionError("coefficient length does not match dictionary");
}

// returns index of first eta <= 0, or -1 if all positive
int first_violation(const Vector& eta) {
    for (std::size_t i = 0; i < eta.size(); ++i)
        if (!(eta[i] > 0.0)) return int(i);
    return -1;
}

}  // namespace

bool in_domain(std::span<const double> b, const DesignMatrices& d) {
    check_dims(b, d);
    Vector eta(d.n);
    kernels::rowwise_dot(d.t.data(), d.n, d.jk, b.data(), eta.data());
    return first_violation(eta) < 0;
}

bool try_evaluate_value(std::span<const double> b, const DesignMatrices& d, double& value) {
    check_dims(b, d);
    Vector e(d.n), eta(d.n);
    kernels::rowwise_dot(d.T.data(), d.n, d.jk, b.data(), e.data());
    kernels::rowwise_dot(d.t.data(), d.n, d.jk, b.data(), eta.data());
    if (first_violation(eta) >= 0) return false;
    double se2 = 0.0, slog = 0.0;
    for (int i = 0; i < d.n; ++i) {
        se2 += e[i] * e[i];
        slog += std::log(eta[i]);
    }
    value = -0.5 * kLog2Pi - 0.5 * se2 / d.n + slog / d.n;
    return true;
}

double evaluate_value(std::span<const double> b, const DesignMatrices& d, Vector* e_out,
                      Vector* eta_out) {
    check_dims(b, d);
    Vector e(d.n), eta(d.n);
    kernels::rowwise_dot(d.T.data(), d.n, d.jk, b.data(), e.data());
    kernels::rowwise_dot(d.t.data(), d.n, d.jk, b.data(), eta.data());
    const int bad = first_violation(eta);
    if (bad >= 0) throw DomainError(bad, eta[bad]);
    double se2 = 0.0, slog = 0.0;
    for (int i = 0; i < d.n; ++i) {
        se2 += e[i] * e[i];
        slog += std::log(eta[i]);
    }
    if (e_out != nullptr) *e_out = std::move(e);
    if (eta_out != nullptr) *eta_out = std::move(eta);
    return -0.5 * kLog2Pi - 0.5 * se2 / d.n + slog / d.n;
}

LikelihoodReport evaluate(std::span<const double> b, const DesignMatrices& d) {
    LikelihoodReport r;
    r.value = evaluate_value(b, d, &r.e, &r.eta);

    const int n = d.n, m = d.jk;
    // score = (T' (-e) + t' (1/eta)) / n
    Vector we(n), winv(n);
    for (int i = 0; i < n; ++i) {
        we[i] = -r.e[i] / n;
        winv[i] = 1.0 / (r.eta[i] * n);
    }
    r.score.assign(m, 0.0);
    Vector tmp(m);
    kernels::weighted_colsum(d.T.data(), n, m, we.data(), r.score.data());
    kernels::weighted_colsum(d.t.data(), n, m, winv.data(), tmp.data());
    for (int l = 0; l < m; ++l) r.score[l] += tmp[l];

    // hessian = -(T'T)/n - (t' diag(1/eta^2) t)/n
    Vector ones(n, 1.0 / n), weta(n);
    for (int i = 0; i < n; ++i) weta[i] = 1.0 / (r.eta[i] * r.eta[i] * n);
    Matrix gT(m, m), gt(m, m);
    kernels::weighted_gram(d.T.data(), n, m, ones.data(), gT.data());
    kernels::weighted_gram(d.t.data(), n, m, weta.data(), gt.data());
    r.hessian = Matrix(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) r.hessian(i, j) = -gT(i, j) - gt(i, j);
    return r;
}

double penalized_value(std::span<const double> b, const DesignMatrices& d, double lambda,
                       std::span<const double> weights) {
    if (lambda < 0.0) throw SpecError("lambda must be nonnegative");
    if (weights.size() != b.size()) throw DimensionError("weights length mismatch");
    double pen = 0.0;
    for (std::size_t l = 0; l < b.size(); ++l) {
        if (weights[l] < 0.0) throw SpecError("penalty weights must be nonnegative");
        pen += weights[l] * std::abs(b[l]);
    }
    return evaluate_value(b, d) - lambda * pen;
}

}  // namespace gtreg
