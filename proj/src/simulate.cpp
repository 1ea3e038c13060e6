#include "gtreg/simulate.hpp"

#include <cmath>
#include <optional>

#include "gtreg/drf.hpp"
#include "gtreg/errors.hpp"
#include "gtreg/gauss.hpp"
#include "gtreg/rng.hpp"

namespace gtreg {

namespace {

void check_spec(const DgpSpec& spec) {
    if (spec.n < 1) throw SpecError("sample size must be positive");
    if (spec.n_covariates < 1) throw SpecError("need at least one covariate");
    if (!(spec.x_hi > spec.x_lo)) throw SpecError("covariate range is degenerate");
}

// feasibility of a custom b0: derivative positive over the covariate range
// and, for spline y-bases, over a fine y grid spanning the knots
void check_b0_feasible(const Dictionary& dict, const Vector& b0, const DgpSpec& spec) {
    if (int(b0.size()) != dict.size()) throw SpecError("b0 does not fit the custom dictionary");
    DrfEvaluator ev(dict, b0);
    const int nx = 41, ny = 101;
    double ylo = dict.y_knot_lo(), yhi = dict.y_knot_hi();
    if (!std::isfinite(ylo)) ylo = -1.0, yhi = 1.0;
    for (int i = 0; i < nx; ++i) {
        Vector x(dict.n_covariates());
        for (int c = 0; c < dict.n_covariates(); ++c)
            x[c] = spec.x_lo + (spec.x_hi - spec.x_lo) * double(i) / (nx - 1);
        const Vector xs = dict.x_to_std(x);
        for (int k = 0; k <= ny; ++k) {
            const double y = ylo - 0.5 + (yhi - ylo + 1.0) * double(k) / ny;
            if (!(ev.eta_std(xs, y) > 0.0))
                throw SpecError("infeasible b0: derivative not positive at x[0]=" +
                                std::to_string(x[0]) + ", y=" + std::to_string(y));
        }
    }
}

}  // namespace

DataSet generate(const DgpSpec& spec) {
    check_spec(spec);
    Rng rng(spec.seed);
    DataSet out;
    out.y.resize(spec.n);
    out.x = Matrix(spec.n, spec.n_covariates);
    for (int c = 0; c < spec.n_covariates; ++c)
        out.x_names.push_back("x" + std::to_string(c + 1));

    std::optional<Dictionary> dict;
    std::optional<DrfEvaluator> ev;
    if (spec.kind == DgpKind::custom_b0) {
        dict = resolve_dictionary(spec.custom_dict, Standardization{}, spec.n_covariates);
        check_b0_feasible(*dict, spec.b0, spec);
        ev.emplace(*dict, spec.b0);
    }

    Vector xrow(spec.n_covariates);
    for (int i = 0; i < spec.n; ++i) {
        for (int c = 0; c < spec.n_covariates; ++c) {
            xrow[c] = spec.x_lo + (spec.x_hi - spec.x_lo) * rng.uniform();
            out.x(i, c) = xrow[c];
        }
        const double e = rng.normal();
        switch (spec.kind) {
            case DgpKind::baseline_gaussian:
                out.y[i] = e;
                break;
            case DgpKind::linear_location_scale: {
                const double b1 = spec.beta1_0 + spec.beta1_1 * xrow[0];
                const double b2 = spec.beta2_0 + spec.beta2_1 * xrow[0];
                if (!(b2 > 0.0)) throw SpecError("location-scale DGP has beta2 <= 0");
                out.y[i] = (e - b1) / b2;
                break;
            }
            case DgpKind::custom_b0: {
                if (dict->J() == 2) {
                    // explicit inverse: e = beta1(x) + beta2(x) y
                    const Vector xs = dict->x_to_std(xrow);
                    Vector w(dict->K());
                    dict->eval_w(xs, w);
                    double b1 = 0.0, b2 = 0.0;
                    for (int k = 0; k < dict->K(); ++k) {
                        b1 += w[k] * spec.b0[k * 2];
                        b2 += w[k] * spec.b0[k * 2 + 1];
                    }
                    out.y[i] = (e - b1) / b2;
                } else {
                    out.y[i] = ev->invert_g_std(dict->x_to_std(xrow), e);
                }
                break;
            }
            case DgpKind::bimodal_misspec: {
                const double comp = rng.uniform() < 0.5 ? -spec.bim_sep : spec.bim_sep;
                out.y[i] = spec.bim_slope * xrow[0] + comp + spec.bim_sd * e;
                break;
            }
        }
    }
    return out;
}

double true_g(const DgpSpec& spec, std::span<const double> x, double y) {
    switch (spec.kind) {
        case DgpKind::baseline_gaussian:
            return y;
        case DgpKind::linear_location_scale: {
            const double b1 = spec.beta1_0 + spec.beta1_1 * x[0];
            const double b2 = spec.beta2_0 + spec.beta2_1 * x[0];
            return b1 + b2 * y;
        }
        case DgpKind::custom_b0: {
            Dictionary dict =
                resolve_dictionary(spec.custom_dict, Standardization{}, spec.n_covariates);
            const Vector T = dict.eval_T(x, y);
            double g = 0.0;
            for (std::size_t l = 0; l < T.size(); ++l) g += spec.b0[l] * T[l];
            return g;
        }
        default:
            throw SpecError("true transform undefined for the misspecified DGP");
    }
}

double lls_quantile(const DgpSpec& spec, double x, double u) {
    const double b1 = spec.beta1_0 + spec.beta1_1 * x;
    const double b2 = spec.beta2_0 + spec.beta2_1 * x;
    return (normal_quantile(u) - b1) / b2;
}

double lls_cdf(const DgpSpec& spec, double x, double y) {
    const double b1 = spec.beta1_0 + spec.beta1_1 * x;
    const double b2 = spec.beta2_0 + spec.beta2_1 * x;
    return normal_cdf(b1 + b2 * y);
}

namespace {

struct MelbourneLaw {
    double p(double x) const { return 1.0 / (1.0 + std::exp(-(x - 36.0) / 2.8)); }
    double m1(double x) const { return 1.8 + 0.93 * x; }
    double m2(double x) const { return 13.0 + 0.16 * x; }
    static constexpr double s1 = 3.2, s2 = 3.0;

    double cdf(double x, double y) const {
        const double w = p(x);
        return (1.0 - w) * normal_cdf((y - m1(x)) / s1) + w * normal_cdf((y - m2(x)) / s2);
    }
    double pdf(double x, double y) const {
        const double w = p(x);
        return (1.0 - w) * normal_pdf((y - m1(x)) / s1) / s1 +
               w * normal_pdf((y - m2(x)) / s2) / s2;
    }
    // inverse CDF: bracket both component quantiles, then safeguarded Newton
    double quantile(double x, double u) const {
        const double q = normal_quantile(u);
        double lo = std::min(m1(x) + s1 * q, m2(x) + s2 * q) - 1.0;
        double hi = std::max(m1(x) + s1 * q, m2(x) + s2 * q) + 1.0;
        double y = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            const double f = cdf(x, y) - u;
            if (std::abs(f) < 1e-13) break;
            if (f > 0.0)
                hi = y;
            else
                lo = y;
            const double d = pdf(x, y);
            double ynew = d > 1e-12 ? y - f / d : 0.5 * (lo + hi);
            if (!(ynew > lo && ynew < hi)) ynew = 0.5 * (lo + hi);
            y = ynew;
        }
        return y;
    }
};

}  // namespace

Vector melbourne_like(int length, std::uint64_t seed) {
    if (length < 2) throw SpecError("series length must be at least 2");
    MelbourneLaw law;
    Rng rng(seed);
    const int burn = 200;
    double x = 20.0;
    Vector series(length);
    for (int t = -burn; t < length; ++t) {
        const double u = normal_cdf(rng.normal());
        const double y = law.quantile(x, u);
        if (t >= 0) series[t] = y;
        x = y;
    }
    return series;
}

DataSet lag_pairs(const Vector& series) {
    if (series.size() < 2) throw DataError("need at least two observations to build lag pairs");
    const int n = int(series.size()) - 1;
    DataSet out;
    out.y.resize(n);
    out.x = Matrix(n, 1);
    out.x_names = {"lag1"};
    for (int i = 0; i < n; ++i) {
        out.y[i] = series[i + 1];
        out.x(i, 0) = series[i];
    }
    return out;
}

}  // namespace gtreg
