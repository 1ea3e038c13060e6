#include "gtreg/drf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gtreg/errors.hpp"
#include "gtreg/gauss.hpp"
#include "gtreg/kernels.hpp"

namespace gtreg {

namespace {
constexpr double kGTol = 1e-10;  // quantile tolerance in g units
}

DrfEvaluator::DrfEvaluator(Dictionary dict, Vector b, std::optional<Matrix> cov_std)
    : dict_(std::move(dict)), b_(std::move(b)), cov_(std::move(cov_std)) {
    if (int(b_.size()) != dict_.size()) throw DimensionError("coefficients do not fit dictionary");
    if (cov_ && (cov_->rows() != dict_.size() || cov_->cols() != dict_.size()))
        throw DimensionError("covariance does not fit dictionary");
}

double DrfEvaluator::g_std(std::span<const double> x_std, double y_std) const {
    Vector T(dict_.size());
    dict_.eval_T_std(x_std, y_std, T);
    return kernels::dot(b_.data(), T.data(), T.size());
}

double DrfEvaluator::eta_std(std::span<const double> x_std, double y_std) const {
    Vector t(dict_.size());
    dict_.eval_t_std(x_std, y_std, t);
    return kernels::dot(b_.data(), t.data(), t.size());
}

double DrfEvaluator::tail_slope_std(std::span<const double> x_std) const {
    Vector w(dict_.K());
    dict_.eval_w(x_std, w);
    const int J = dict_.J();
    double slope = 0.0;
    for (int k = 0; k < dict_.K(); ++k) slope += w[k] * b_[k * J + 1];
    return slope;
}

DrfEvaluator::Value DrfEvaluator::cdf(std::span<const double> x_raw, double y_raw) const {
    const Vector xs = dict_.x_to_std(x_raw);
    const double ys = dict_.standardization().y_to_std(y_raw);
    Vector T(dict_.size());
    dict_.eval_T_std(xs, ys, T);
    const double g = kernels::dot(b_.data(), T.data(), T.size());
    Value v;
    v.estimate = normal_cdf(g);
    if (cov_) v.se = normal_pdf(g) * std::sqrt(std::max(0.0, quad_form(*cov_, T)));
    return v;
}

DrfEvaluator::Value DrfEvaluator::pdf(std::span<const double> x_raw, double y_raw) const {
    const Vector xs = dict_.x_to_std(x_raw);
    const double ys = dict_.standardization().y_to_std(y_raw);
    const int m = dict_.size();
    Vector T(m), t(m);
    dict_.eval_T_std(xs, ys, T);
    dict_.eval_t_std(xs, ys, t);
    const double g = kernels::dot(b_.data(), T.data(), m);
    const double eta = kernels::dot(b_.data(), t.data(), m);
    const double ysd = dict_.standardization().y_sd;
    Value v;
    v.estimate = normal_pdf(g) * eta / ysd;
    if (cov_) {
        Vector delta(m);  // -g * eta * T + t
        for (int l = 0; l < m; ++l) delta[l] = -g * eta * T[l] + t[l];
        v.se = normal_pdf(g) * std::sqrt(std::max(0.0, quad_form(*cov_, delta))) / ysd;
    }
    return v;
}

double DrfEvaluator::quantile_std(std::span<const double> x_std, double u) const {
    if (!(u > 0.0 && u < 1.0)) throw SpecError("quantile level must lie in (0,1)");
    return invert_g_std(x_std, normal_quantile(u));
}

double DrfEvaluator::invert_g_std(std::span<const double> x_std, double target) const {
    const double slope = tail_slope_std(x_std);

    const double klo = dict_.y_knot_lo();
    const double khi = dict_.y_knot_hi();
    const bool has_spline = std::isfinite(klo);

    if (!has_spline) {
        // g affine in y everywhere: g(y) = g(0) + slope * y
        const double g0 = g_std(x_std, 0.0);
        if (!(slope > 0.0)) {
            throw DataError("quantile level unattainable: derivative slope " +
                            std::to_string(slope) + " is not positive");
        }
        return (target - g0) / slope;
    }

    const double glo = g_std(x_std, klo);
    const double ghi = g_std(x_std, khi);
    if (slope > 0.0 && target <= glo) return klo + (target - glo) / slope;  // exact affine tail
    if (slope > 0.0 && target >= ghi) return khi + (target - ghi) / slope;
    if (!(slope > 0.0) && (target < std::min(glo, ghi) || target > std::max(glo, ghi))) {
        throw DataError("level with transform value " + std::to_string(target) +
                        " outside attainable range: g spans [" + std::to_string(std::min(glo, ghi)) +
                        ", " + std::to_string(std::max(glo, ghi)) + "] with tail slope " +
                        std::to_string(slope));
    }

    // bracket doubling from the sample median (0 in standardized units)
    double lo = 0.0, hi = 0.0, step = 1.0;
    double gmid = g_std(x_std, 0.0);
    if (gmid >= target) {
        hi = 0.0;
        lo = -step;
        for (int k = 0; k < 200 && g_std(x_std, lo) > target; ++k) {
            hi = lo;
            step *= 2.0;
            lo -= step;
        }
    } else {
        lo = 0.0;
        hi = step;
        for (int k = 0; k < 200 && g_std(x_std, hi) < target; ++k) {
            lo = hi;
            step *= 2.0;
            hi += step;
        }
    }
    double flo = g_std(x_std, lo) - target;
    double fhi = g_std(x_std, hi) - target;
    if (flo > 0.0 || fhi < 0.0)
        throw DataError("bracketing failed: transform value " + std::to_string(target) +
                        " not attained");

    // safeguarded Newton within the bracket
    double y = 0.5 * (lo + hi);
    double f = g_std(x_std, y) - target;
    for (int it = 0; it < 200; ++it) {
        if (std::abs(f) <= kGTol) return y;
        if (f > 0.0)
            hi = y;
        else
            lo = y;
        const double eta = eta_std(x_std, y);
        double ynew = (eta > 1e-12) ? y - f / eta : 0.5 * (lo + hi);
        if (!(ynew > lo && ynew < hi)) ynew = 0.5 * (lo + hi);
        y = ynew;
        f = g_std(x_std, y) - target;
        if (hi - lo < 1e-15 * std::max(1.0, std::abs(y))) break;
    }
    if (std::abs(f) > 1e-6)
        throw DataError("root solve for transform value " + std::to_string(target) +
                        " did not converge");
    return y;
}

DrfEvaluator::Value DrfEvaluator::quantile(std::span<const double> x_raw, double u) const {
    const Vector xs = dict_.x_to_std(x_raw);
    const double y0 = quantile_std(xs, u);
    Value v;
    v.estimate = dict_.standardization().y_to_raw(y0);
    if (cov_) {
        const int m = dict_.size();
        Vector T(m);
        dict_.eval_T_std(xs, y0, T);
        const double eta = eta_std(xs, y0);
        v.se = std::sqrt(std::max(0.0, quad_form(*cov_, T))) / std::abs(eta) *
               dict_.standardization().y_sd;
    }
    return v;
}

QgmReport qgm_check(const DrfEvaluator& ev, const Matrix& x_grid, std::span<const double> u_grid) {
    if (x_grid.rows() == 0 || u_grid.empty()) throw SpecError("qgm grids must be nonempty");
    QgmReport rep;
    rep.grid = std::to_string(x_grid.rows()) + " x-points x " + std::to_string(u_grid.size()) +
               " u-levels";
    const auto& dict = ev.dictionary();
    Vector xrow(x_grid.cols());
    for (int i = 0; i < x_grid.rows(); ++i) {
        for (int c = 0; c < x_grid.cols(); ++c) xrow[c] = x_grid(i, c);
        const Vector xs = dict.x_to_std(xrow);
        for (double u : u_grid) {
            double eta;
            bool bad;
            try {
                const double y0 = ev.quantile_std(xs, u);
                eta = ev.eta_std(xs, y0);
                bad = !(eta > 0.0);
            } catch (const DataError&) {
                eta = std::numeric_limits<double>::quiet_NaN();
                bad = true;  // unattainable level counts as a violation
            }
            if (bad) rep.violations.push_back({xrow, u, eta});
        }
    }
    rep.passed = rep.violations.empty();
    return rep;
}

Matrix default_qgm_x_grid(const DataSet& data, int points) {
    const int p = data.x.cols();
    Matrix grid(points, p);
    for (int c = 0; c < p; ++c) {
        double lo = data.x(0, c), hi = data.x(0, c);
        for (int i = 1; i < data.n(); ++i) {
            lo = std::min(lo, data.x(i, c));
            hi = std::max(hi, data.x(i, c));
        }
        for (int i = 0; i < points; ++i)
            grid(i, c) = lo + (hi - lo) * double(i) / double(points - 1);
    }
    return grid;
}

Vector default_qgm_u_grid() {
    Vector u;
    for (int k = 1; k <= 99; ++k) u.push_back(k / 100.0);
    return u;
}

std::vector<BandRow> band_grid(const DrfEvaluator& ev, const Matrix& x_values,
                               std::span<const double> grid, const std::string& kind,
                               double level) {
    if (!ev.has_cov()) throw SpecError("band_grid requires a stored covariance");
    if (!(level > 0.0 && level < 1.0)) throw SpecError("band level must lie in (0,1)");
    const double z = normal_quantile(0.5 + level / 2.0);
    std::vector<BandRow> rows;
    Vector xrow(x_values.cols());
    for (int i = 0; i < x_values.rows(); ++i) {
        for (int c = 0; c < x_values.cols(); ++c) xrow[c] = x_values(i, c);
        for (double at : grid) {
            DrfEvaluator::Value v;
            if (kind == "cdf")
                v = ev.cdf(xrow, at);
            else if (kind == "pdf")
                v = ev.pdf(xrow, at);
            else if (kind == "quantile")
                v = ev.quantile(xrow, at);
            else
                throw SpecError("unknown band kind: " + kind);
            BandRow row;
            row.x = xrow;
            row.at = at;
            row.estimate = v.estimate;
            const double se = v.se.value_or(0.0);
            row.lower = v.estimate - z * se;
            row.upper = v.estimate + z * se;
            if (kind == "cdf") {  // output clipping only
                row.lower = std::clamp(row.lower, 0.0, 1.0);
                row.upper = std::clamp(row.upper, 0.0, 1.0);
            }
            row.kind = kind;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

namespace {

// constraint grid over the standardized sample range, n_side points per axis
std::vector<ConstraintPoint> constraint_grid(const DesignMatrices& d, const DataSet& data,
                                             const Dictionary& dict, int n_side, double eps) {
    double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
    for (double v : data.y) {
        const double z = dict.standardization().y_to_std(v);
        ylo = std::min(ylo, z);
        yhi = std::max(yhi, z);
    }
    const int p = d.standardization.x_means.empty() ? data.x.cols() : data.x.cols();
    Matrix xg(n_side, p);
    for (int c = 0; c < p; ++c) {
        double lo = data.x(0, c), hi = data.x(0, c);
        for (int i = 1; i < data.n(); ++i) {
            lo = std::min(lo, data.x(i, c));
            hi = std::max(hi, data.x(i, c));
        }
        for (int i = 0; i < n_side; ++i) xg(i, c) = lo + (hi - lo) * double(i) / (n_side - 1);
    }
    std::vector<ConstraintPoint> pts;
    Vector xrow(p);
    for (int i = 0; i < n_side; ++i) {
        for (int c = 0; c < p; ++c) xrow[c] = xg(i, c);
        const Vector xs = dict.x_to_std(xrow);
        for (int k = 0; k < n_side; ++k) {
            ConstraintPoint cp;
            cp.x = xs;
            cp.y = ylo + (yhi - ylo) * double(k) / (n_side - 1);
            cp.eps = eps;
            pts.push_back(std::move(cp));
        }
    }
    return pts;
}

}  // namespace

QgmRepairResult fit_with_qgm_repair(const DesignMatrices& d, const Dictionary& dict,
                                    const DataSet& data, const SolverConfig& cfg, int max_rounds,
                                    double eps) {
    QgmRepairResult out;
    const Matrix x_grid = default_qgm_x_grid(data);
    const Vector u_grid = default_qgm_u_grid();

    out.fit = fit_ml(d, cfg);
    out.report = qgm_check(DrfEvaluator(dict, out.fit.b_hat), x_grid, u_grid);
    out.fit.qgm_ok = out.report.passed;
    if (out.report.passed) return out;

    int n_side = 5;
    for (int round = 1; round <= max_rounds; ++round) {
        const auto constraints = constraint_grid(d, data, dict, n_side, eps);
        FitResult fit = fit_ml_constrained(d, cfg, constraints, dict);
        QgmReport rep = qgm_check(DrfEvaluator(dict, fit.b_hat), x_grid, u_grid);
        fit.qgm_ok = rep.passed;
        out.fit = std::move(fit);
        out.report = std::move(rep);
        out.rounds = round;
        if (out.report.passed) return out;
        n_side = 2 * n_side - 1;  // 5, 9, 17, 33
    }
    return out;
}

}  // namespace gtreg
