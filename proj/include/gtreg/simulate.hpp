#pragma once

#include <cstdint>

#include "gtreg/dictionary.hpp"

namespace gtreg {

enum class DgpKind { baseline_gaussian, linear_location_scale, custom_b0, bimodal_misspec };

/// Ground-truth data generators for recovery, coverage, selection, and
/// misspecification experiments. Identical spec + seed reproduces the
/// sample byte for byte.
struct DgpSpec {
    DgpKind kind = DgpKind::baseline_gaussian;
    int n = 0;
    std::uint64_t seed = 0;

    // covariate law: iid uniform on [x_lo, x_hi] per covariate
    int n_covariates = 1;
    double x_lo = 0.0, x_hi = 1.0;

    // linear-location-scale: e = beta1(x) + beta2(x) y with
    // beta1(x) = beta1_0 + beta1_1 x, beta2(x) = beta2_0 + beta2_1 x > 0,
    // inverted exactly as y = (e - beta1(x)) / beta2(x).
    double beta1_0 = -1.0, beta1_1 = -1.0;
    double beta2_0 = 1.0, beta2_1 = 0.5;

    // custom-b0: explicit GT model e = b0'T(x,y) on a resolved dictionary
    // (standardize = false); inverted by the same safeguarded root finder
    // the quantile evaluator uses.
    DictionarySpec custom_dict;
    Vector b0;

    // bimodal misspecification: y = bim_slope * x + m, with m an equal
    // mixture of N(-bim_sep, bim_sd^2) and N(+bim_sep, bim_sd^2); the
    // conditional law is bimodal for every x.
    double bim_slope = 0.5, bim_sep = 1.5, bim_sd = 0.5;
};

DataSet generate(const DgpSpec& spec);

/// True transform value b0'T(x,y) of a DGP at a point: the oracle for
/// coverage and recovery experiments. Only defined for the correctly
/// specified kinds (baseline, location-scale, custom-b0).
double true_g(const DgpSpec& spec, std::span<const double> x, double y);

/// Analytic conditional quantile of the location-scale DGP.
double lls_quantile(const DgpSpec& spec, double x, double u);
double lls_cdf(const DgpSpec& spec, double x, double y);

/// Synthetic stand-in for the Melbourne daily temperature series: a
/// stationary AR(1)-type law whose conditional density is unimodal after
/// cool days and bimodal after hot days. Conditional law of y_t given
/// y_{t-1} = x is the two-component Gaussian mixture
///     (1 - p(x)) N(1.8 + 0.93 x, 3.2^2) + p(x) N(13.0 + 0.16 x, 3.0^2),
/// p(x) = logistic((x - 36) / 2.8): the "break" component takes over after
/// hot days. Draws go through the Gaussian transform of the mixture CDF, so
/// one standard normal is consumed per step.
Vector melbourne_like(int length, std::uint64_t seed);

/// (y_t, y_{t-1}) pairs from a series; n-1 rows.
DataSet lag_pairs(const Vector& series);

}  // namespace gtreg
