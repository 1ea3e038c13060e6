#pragma once

#include <cmath>

namespace gtreg {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;

/// Standard normal density.
inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

/// Standard normal CDF via erfc, accurate in both tails.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

/// Standard normal quantile, Wichura's algorithm AS 241 (PPND16).
/// Relative error below 1e-15 on (0,1); returns +/-inf at the endpoints.
double normal_quantile(double p);

}  // namespace gtreg
