#include "gtreg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gtreg/errors.hpp"
#include "gtreg/kernels.hpp"
#include "gtreg/objective.hpp"

namespace gtreg {

void SolverConfig::validate() const {
    if (max_iter <= 0 || grad_tol <= 0.0 || armijo_c <= 0.0) throw SpecError("solver config must be positive");
    if (!(boundary_fraction > 0.0 && boundary_fraction < 1.0))
        throw SpecError("boundary_fraction must lie in (0,1)");
    if (!(backtrack_ratio > 0.0 && backtrack_ratio < 1.0))
        throw SpecError("backtrack_ratio must lie in (0,1)");
}

Vector initial_point(const DesignMatrices& d) {
    Vector b(d.jk, 0.0);
    b[1] = 1.0;  // column l=1 is W_1 * S_2 = Y for every dictionary
    return b;
}

namespace {

// Extra log-barrier rows mu * log(b't_c - eps_c) appended to Q_n during
// constrained fits. Empty rows = plain maximum likelihood.
struct Barrier {
    Matrix t_rows;  // c x jk
    Vector eps;
    double mu = 0.0;  // barrier weight, mean (per-observation) scale
    int count() const { return t_rows.rows(); }
};

struct AugEval {
    double value;
    Vector grad;
    Matrix hess;
    Vector eta;
    Vector slack;  // constraint slacks
    double score_norm;  // sup-norm of the plain Q_n score
};

bool feasible_slacks(const Barrier& bar, std::span<const double> b, Vector& slack) {
    const int c = bar.count();
    slack.resize(c);
    if (c == 0) return true;
    kernels::rowwise_dot(bar.t_rows.data(), c, bar.t_rows.cols(), b.data(), slack.data());
    for (int i = 0; i < c; ++i) {
        slack[i] -= bar.eps[i];
        if (!(slack[i] > 0.0)) return false;
    }
    return true;
}

bool aug_value(const DesignMatrices& d, const Barrier& bar, std::span<const double> b,
               double& out) {
    double q;
    if (!try_evaluate_value(b, d, q)) return false;
    Vector slack;
    if (!feasible_slacks(bar, b, slack)) return false;
    for (double s : slack) q += bar.mu * std::log(s);
    out = q;
    return true;
}

AugEval aug_evaluate(const DesignMatrices& d, const Barrier& bar, std::span<const double> b) {
    LikelihoodReport rep = evaluate(b, d);
    AugEval out;
    out.score_norm = norm_inf(rep.score);
    out.value = rep.value;
    out.grad = rep.score;
    out.hess = std::move(rep.hessian);
    out.eta = std::move(rep.eta);
    if (!feasible_slacks(bar, b, out.slack)) throw DomainError(-1, 0.0);
    const int m = d.jk;
    for (int c = 0; c < bar.count(); ++c) {
        out.value += bar.mu * std::log(out.slack[c]);
        const double* tc = bar.t_rows.row(c);
        const double g = bar.mu / out.slack[c];
        kernels::axpy(g, tc, out.grad.data(), m);
        const double h = bar.mu / (out.slack[c] * out.slack[c]);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) out.hess(i, j) -= h * tc[i] * tc[j];
    }
    return out;
}

// Largest step keeping all sample etas (and constraint slacks) positive.
double max_step(const DesignMatrices& d, const Barrier& bar, const Vector& eta,
                const Vector& slack, std::span<const double> delta) {
    Vector deta(d.n);
    kernels::rowwise_dot(d.t.data(), d.n, d.jk, delta.data(), deta.data());
    double amax = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d.n; ++i)
        if (deta[i] < 0.0) amax = std::min(amax, -eta[i] / deta[i]);
    if (bar.count() > 0) {
        Vector ds(bar.count());
        kernels::rowwise_dot(bar.t_rows.data(), bar.count(), d.jk, delta.data(), ds.data());
        for (int c = 0; c < bar.count(); ++c)
            if (ds[c] < 0.0) amax = std::min(amax, -slack[c] / ds[c]);
    }
    return amax;
}

struct NewtonOutcome {
    Vector b;
    int iterations = 0;
    bool converged = false;
    bool gradient_fallback = false;
    double value = 0.0;
    double score_norm = 0.0;
    Vector value_trace;
};

// Cancellation floor of the augmented gradient: with an active constraint
// the slack is a difference of nearly equal numbers, so mu/slack carries a
// relative error of eps*|eta|/slack and the gradient cannot be verified
// below mult * that error.
double barrier_grad_noise(const Barrier& bar, const Vector& slack) {
    double noise = 0.0;
    for (int c = 0; c < bar.count(); ++c) {
        const double eta = slack[c] + bar.eps[c];
        double row_max = 0.0;
        for (int l = 0; l < bar.t_rows.cols(); ++l)
            row_max = std::max(row_max, std::abs(bar.t_rows(c, l)));
        const double mult = bar.mu / slack[c];
        noise += mult * (2.2e-16 * (std::abs(eta) + 1.0) / slack[c]) * row_max;
    }
    return noise;
}

// Damped Newton ascent of Q_n + barrier. Converges on the sup-norm of the
// augmented gradient; afterwards polishes with up to three extra full steps
// so the plain score lands deep below tolerance (quadratic phase).
NewtonOutcome newton_maximize(const DesignMatrices& d, const Barrier& bar, Vector b,
                              const SolverConfig& cfg, bool polish) {
    NewtonOutcome out;
    AugEval cur = aug_evaluate(d, bar, b);
    const int m = d.jk;
    int polish_left = polish ? 3 : 0;
    bool main_converged = false;

    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        const double gnorm = norm_inf(cur.grad);
        const double tol = std::max(cfg.grad_tol, 2.0 * barrier_grad_noise(bar, cur.slack));
        if (!main_converged && gnorm <= tol) main_converged = true;
        if (main_converged) {
            if (polish_left == 0 || gnorm <= 1e-14) break;
            --polish_left;
        }

        // solve (-H + nu I) delta = grad; the small Levenberg term keeps the
        // factorization healthy when the design is numerically singular (a
        // machine-epsilon pivot would otherwise poison the whole step) and
        // is invisible four-plus orders below any honest curvature
        double diag_max = 0.0;
        for (int i = 0; i < m; ++i) diag_max = std::max(diag_max, -cur.hess(i, i));
        Vector delta;
        bool solved = false;
        for (double nu = 1e-10 * diag_max; nu <= 1e-3 * diag_max && !solved; nu *= 100.0) {
            Matrix neg_h(m, m);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) neg_h(i, j) = -cur.hess(i, j);
            for (int i = 0; i < m; ++i) neg_h(i, i) += nu;
            solved = solve_spd(std::move(neg_h), cur.grad, delta);
        }
        if (!solved) {
            out.gradient_fallback = true;
            delta = cur.grad;
        }

        double slope = kernels::dot(cur.grad.data(), delta.data(), m);
        if (slope <= 0.0) {  // numerically null direction
            break;
        }
        const double amax = max_step(d, bar, cur.eta, cur.slack, delta);
        double alpha = std::min(1.0, cfg.boundary_fraction * amax);
        bool accepted = false;
        double trial_val = 0.0;
        Vector trial(m);
        // slack for float cancellation when the objective change is at the
        // noise floor of the accumulated log-likelihood
        const double fuzz = 1e-12 * (1.0 + std::abs(cur.value));
        while (alpha > 1e-18) {
            for (int l = 0; l < m; ++l) trial[l] = b[l] + alpha * delta[l];
            if (aug_value(d, bar, trial, trial_val) &&
                trial_val >= cur.value + cfg.armijo_c * alpha * slope - fuzz) {
                accepted = true;
                break;
            }
            alpha *= cfg.backtrack_ratio;
        }
        if (!accepted) break;
        b = trial;
        cur = aug_evaluate(d, bar, b);
        out.value_trace.push_back(cur.value);
        ++out.iterations;
    }

    out.b = std::move(b);
    out.converged = main_converged ||
                    norm_inf(cur.grad) <=
                        std::max(cfg.grad_tol, 2.0 * barrier_grad_noise(bar, cur.slack));
    out.value = cur.value;
    out.score_norm = cur.score_norm;
    return out;
}

void design_eigs(const DesignMatrices& d, FitResult& fit) {
    const int m = d.jk;
    Vector w(d.n, 1.0 / d.n);
    Matrix gram(m, m);
    kernels::weighted_gram(d.T.data(), d.n, m, w.data(), gram.data());
    SymEig eig = sym_eig(std::move(gram));
    fit.design_min_eig = eig.values.front();
    fit.design_max_eig = eig.values.back();
    if (fit.design_min_eig < 1e-10 * fit.design_max_eig)
        fit.notes.push_back("design near-singular: min eigenvalue of T'T/n is " +
                            std::to_string(fit.design_min_eig));
}

}  // namespace

FitResult fit_ml_from(const DesignMatrices& d, const SolverConfig& cfg, const Vector& start) {
    cfg.validate();
    FitResult fit;
    design_eigs(d, fit);
    Barrier none;
    NewtonOutcome res = newton_maximize(d, none, start, cfg, /*polish=*/true);
    fit.b_hat = std::move(res.b);
    fit.value = res.value;
    fit.score_norm = res.score_norm;
    fit.iterations = res.iterations;
    fit.converged = res.converged;
    fit.gradient_fallback_used = res.gradient_fallback;
    fit.value_trace = std::move(res.value_trace);
    if (res.gradient_fallback) fit.notes.push_back("singular Hessian: gradient ascent steps used");
    return fit;
}

FitResult fit_ml(const DesignMatrices& d, const SolverConfig& cfg) {
    return fit_ml_from(d, cfg, initial_point(d));
}

FitResult fit_ml_constrained_rows(const DesignMatrices& d, const SolverConfig& cfg,
                                  const Matrix& t_rows, const Vector& eps) {
    if (t_rows.rows() == 0) return fit_ml(d, cfg);
    cfg.validate();

    Barrier bar;
    bar.t_rows = t_rows;
    bar.eps = eps;
    for (double e : eps)
        if (!(e > 0.0)) throw SpecError("constraint eps must be positive");

    FitResult fit;
    design_eigs(d, fit);

    Vector b = initial_point(d);
    {
        Vector slack;
        if (!feasible_slacks(bar, b, slack))
            throw SpecError("constraint set infeasible at the canonical start");
    }

    // drive the auxiliary barrier weight toward zero; warm-start each stage.
    // mu stops at 1e-9: active slacks land near mu/multiplier, far below any
    // reported tolerance but above the double-precision cancellation floor.
    NewtonOutcome res;
    for (double mu = 1e-3; mu >= 0.5e-9; mu *= 0.1) {
        bar.mu = mu;
        res = newton_maximize(d, bar, b, cfg, /*polish=*/false);
        b = res.b;
        fit.iterations += res.iterations;
        for (double v : res.value_trace) fit.value_trace.push_back(v);
    }
    bar.mu = 0.0;  // report plain Q_n value
    fit.b_hat = std::move(b);
    LikelihoodReport rep = evaluate(fit.b_hat, d);
    fit.value = rep.value;
    fit.score_norm = norm_inf(rep.score);
    fit.converged = res.converged;
    fit.gradient_fallback_used = res.gradient_fallback;
    return fit;
}

FitResult fit_ml_constrained(const DesignMatrices& d, const SolverConfig& cfg,
                             const std::vector<ConstraintPoint>& constraints,
                             const Dictionary& dict) {
    if (constraints.empty()) return fit_ml(d, cfg);
    Matrix t_rows(int(constraints.size()), d.jk);
    Vector eps(constraints.size());
    for (std::size_t c = 0; c < constraints.size(); ++c) {
        const auto& p = constraints[c];
        if (!std::isfinite(p.y)) throw SpecError("constraint point must be finite");
        dict.eval_t_std(p.x, p.y, {t_rows.row(int(c)), std::size_t(d.jk)});
        eps[c] = p.eps;
    }
    FitResult fit = fit_ml_constrained_rows(d, cfg, t_rows, eps);
    fit.constraints_added = constraints;
    return fit;
}

Vector adaptive_weights(const FitResult& first_step, std::span<const int> unpenalized) {
    Vector w(first_step.b_hat.size(), 0.0);
    for (std::size_t l = 0; l < w.size(); ++l) {
        const double bl = first_step.b_hat[l];
        w[l] = (bl != 0.0) ? 1.0 / std::abs(bl) : 0.0;
    }
    for (int l : unpenalized)
        if (l >= 0 && l < int(w.size())) w[l] = 0.0;
    return w;
}

std::vector<int> default_unpenalized() { return {0, 1}; }

namespace {

double weighted_l1(std::span<const double> b, const Vector& w) {
    double s = 0.0;
    for (std::size_t l = 0; l < b.size(); ++l) s += w[l] * std::abs(b[l]);
    return s;
}

// sum-scale stationarity residual of the penalized problem
double kkt_residual(const Vector& b, const Vector& score_mean, const Vector& w, double lambda,
                    int n) {
    double worst = 0.0;
    for (std::size_t l = 0; l < b.size(); ++l) {
        const double g = n * score_mean[l];
        double r;
        if (w[l] == 0.0) {
            r = std::abs(g);
        } else if (b[l] != 0.0) {
            r = std::abs(g - lambda * w[l] * (b[l] > 0.0 ? 1.0 : -1.0));
        } else {
            r = std::max(0.0, std::abs(g) - lambda * w[l]);
        }
        worst = std::max(worst, r);
    }
    return worst;
}

}  // namespace

PenalizedFit fit_adaptive_lasso(const DesignMatrices& d, const SolverConfig& cfg,
                                const FitResult& first_step, double lambda,
                                std::span<const int> unpenalized) {
    cfg.validate();
    if (!(lambda > 0.0)) throw SpecError("lambda must be positive");
    if (!first_step.converged) throw SpecError("first-step fit has not converged");

    const int n = d.n, m = d.jk;
    PenalizedFit out;
    out.lambda = lambda;
    out.weights = adaptive_weights(first_step, unpenalized);

    Vector b = first_step.b_hat;
    Barrier none;
    const double kkt_tol = cfg.grad_tol * n;

    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        LikelihoodReport rep = evaluate(b, d);
        out.kkt_residual = kkt_residual(b, rep.score, out.weights, lambda, n);
        ++out.iterations;
        if (out.kkt_residual <= kkt_tol) {
            out.converged = true;
            out.value = rep.value;
            break;
        }

        // proximal Newton subproblem on the sum-scale quadratic model,
        // solved by orthant-projected Newton: working set from the model
        // subgradient, ridge-damped solve on that set, line search with
        // sign clamping on the model objective. Robust when the design is
        // numerically singular; the damping never biases the outer solution
        // because the outer line search uses the exact penalized objective.
        Vector grad_sum(m);
        for (int l = 0; l < m; ++l) grad_sum[l] = n * rep.score[l];
        Matrix hess_sum(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) hess_sum(i, j) = n * rep.hessian(i, j);
        double diag_scale = 0.0;
        for (int l = 0; l < m; ++l) diag_scale = std::max(diag_scale, -hess_sum(l, l));
        const double ridge = 1e-9 * diag_scale;

        auto model_value = [&](const Vector& z) {
            double v = 0.0;
            Vector dz(m);
            for (int l = 0; l < m; ++l) dz[l] = z[l] - b[l];
            for (int l = 0; l < m; ++l) {
                v += grad_sum[l] * dz[l] +
                     0.5 * dz[l] * kernels::dot(hess_sum.row(l), dz.data(), m);
                v -= lambda * out.weights[l] * std::abs(z[l]);
            }
            return v;
        };

        Vector z = b;
        const double sub_tol = std::max(1e-13 * n, 1e-3 * std::min(out.kkt_residual, 1.0));
        for (int inner = 0; inner < 100; ++inner) {
            Vector dz(m), mg(m);
            for (int l = 0; l < m; ++l) dz[l] = z[l] - b[l];
            for (int l = 0; l < m; ++l)
                mg[l] = grad_sum[l] + kernels::dot(hess_sum.row(l), dz.data(), m);

            // model KKT residual and working set
            double res = 0.0;
            std::vector<int> ws;
            Vector sign(m, 0.0);
            for (int l = 0; l < m; ++l) {
                const double bound = lambda * out.weights[l];
                if (z[l] != 0.0 || out.weights[l] == 0.0) {
                    const double s = z[l] > 0.0 ? 1.0 : (z[l] < 0.0 ? -1.0 : 0.0);
                    res = std::max(res, std::abs(mg[l] - bound * s));
                    ws.push_back(l);
                    sign[l] = (out.weights[l] == 0.0) ? 0.0 : s;
                } else if (std::abs(mg[l]) > bound) {
                    res = std::max(res, std::abs(mg[l]) - bound);
                    ws.push_back(l);
                    sign[l] = mg[l] > 0.0 ? 1.0 : -1.0;
                }
            }
            if (res <= sub_tol || ws.empty()) break;

            const int p = int(ws.size());
            Matrix h_ww(p, p);
            Vector rhs(p);
            for (int a = 0; a < p; ++a) {
                const int la = ws[a];
                rhs[a] = mg[la] - lambda * out.weights[la] * sign[la];
                for (int c = 0; c < p; ++c) h_ww(a, c) = -hess_sum(la, ws[c]);
                h_ww(a, a) += ridge;
            }
            Vector dir;
            if (!solve_spd(std::move(h_ww), rhs, dir)) break;
            double slope = 0.0;
            for (int a = 0; a < p; ++a) slope += rhs[a] * dir[a];
            if (!(slope > 0.0)) break;

            const double m0 = model_value(z);
            double t = 1.0;
            bool moved = false;
            Vector trial_z;
            while (t > 1e-16) {
                trial_z = z;
                for (int a = 0; a < p; ++a) {
                    const int la = ws[a];
                    double v = z[la] + t * dir[a];
                    // clamp sign flips of penalized coordinates to zero
                    if (out.weights[la] > 0.0) {
                        const double s = sign[la] != 0.0 ? sign[la] : (v >= 0.0 ? 1.0 : -1.0);
                        if (v * s < 0.0) v = 0.0;
                    }
                    trial_z[la] = v;
                }
                if (model_value(trial_z) >= m0 + 1e-6 * t * slope - 1e-12 * (1.0 + std::abs(m0))) {
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if (!moved) break;
            z = trial_z;
        }

        Vector delta(m);
        for (int l = 0; l < m; ++l) delta[l] = z[l] - b[l];
        if (norm_inf(delta) <= 1e-14) {
            out.converged = out.kkt_residual <= kkt_tol;
            out.value = rep.value;
            break;
        }

        const double pen_b = weighted_l1(b, out.weights);
        const double pen_z = weighted_l1(z, out.weights);
        const double decrease =
            kernels::dot(grad_sum.data(), delta.data(), m) - lambda * (pen_z - pen_b);

        const double amax = max_step(d, none, rep.eta, {}, delta);
        double alpha = std::min(1.0, cfg.boundary_fraction * amax);
        const double f0 = n * rep.value - lambda * pen_b;
        const double fuzz = 1e-12 * (1.0 + std::abs(f0));
        Vector trial(m);
        bool accepted = false;
        while (alpha > 1e-18) {
            if (alpha == 1.0) {
                trial = z;  // keep thresholded exact zeros
            } else {
                for (int l = 0; l < m; ++l) trial[l] = b[l] + alpha * delta[l];
            }
            double qv;
            if (try_evaluate_value(trial, d, qv)) {
                const double fv = n * qv - lambda * weighted_l1(trial, out.weights);
                if (fv >= f0 + cfg.armijo_c * alpha * decrease - fuzz) {
                    accepted = true;
                    break;
                }
            }
            alpha *= cfg.backtrack_ratio;
        }
        if (!accepted) {
            out.value = rep.value;
            break;
        }
        b = trial;
    }

    if (!out.converged) {
        LikelihoodReport rep = evaluate(b, d);
        out.kkt_residual = kkt_residual(b, rep.score, out.weights, lambda, n);
        out.value = rep.value;
        out.converged = out.kkt_residual <= kkt_tol;
    }

    out.b_al = std::move(b);
    for (int l = 0; l < m; ++l)
        if (out.b_al[l] != 0.0) out.active_set.push_back(l);
    out.bic = -2.0 * n * out.value + double(out.active_set.size()) * std::log(double(n));
    return out;
}

}  // namespace gtreg
