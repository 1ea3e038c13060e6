#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include <cmath>
#include <functional>
#include <vector>

#include "gtreg/linalg.hpp"

namespace oracle {

/// Textbook Cox-de Boor recursion, one basis function at a time. Slow and
/// direct; knots may repeat (0/0 treated as 0).
inline double cox_de_boor(const std::vector<double>& t, int j, int d, double x) {
    if (d == 0) return (x >= t[j] && x < t[j + 1]) ? 1.0 : 0.0;
    double left = 0.0, right = 0.0;
    const double dl = t[j + d] - t[j];
    if (dl > 0.0) left = (x - t[j]) / dl * cox_de_boor(t, j, d - 1, x);
    const double dr = t[j + d + 1] - t[j + 1];
    if (dr > 0.0) right = (t[j + d + 1] - x) / dr * cox_de_boor(t, j + 1, d - 1, x);
    return left + right;
}

/// Central finite-difference gradient of a scalar function.
inline gtreg::Vector fd_gradient(const std::function<double(const gtreg::Vector&)>& f,
                                 const gtreg::Vector& x, double h = 1e-6) {
    gtreg::Vector g(x.size());
    gtreg::Vector xp = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double hi = h * std::max(1.0, std::abs(x[i]));
        xp[i] = x[i] + hi;
        const double fp = f(xp);
        xp[i] = x[i] - hi;
        const double fm = f(xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * hi);
    }
    return g;
}

/// Central finite-difference Jacobian of a vector function.
inline gtreg::Matrix fd_jacobian(const std::function<gtreg::Vector(const gtreg::Vector&)>& f,
                                 const gtreg::Vector& x, double h = 1e-6) {
    gtreg::Vector xp = x;
    const gtreg::Vector f0 = f(x);
    gtreg::Matrix jac(int(f0.size()), int(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double hi = h * std::max(1.0, std::abs(x[i]));
        xp[i] = x[i] + hi;
        const gtreg::Vector fp = f(xp);
        xp[i] = x[i] - hi;
        const gtreg::Vector fm = f(xp);
        xp[i] = x[i];
        for (std::size_t r = 0; r < f0.size(); ++r)
            jac(int(r), int(i)) = (fp[r] - fm[r]) / (2.0 * hi);
    }
    return jac;
}

namespace detail {
inline double simpson(double a, double fa, double fb, double b, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

// min_depth forces subdivision before the error test may fire: the plain
// acceptance test can cancel exactly on piecewise-linear integrands.
inline double adaptive(const std::function<double(double)>& f, double a, double fa, double b,
                       double fb, double m, double fm, double whole, double tol, int depth,
                       int min_depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, fm, m, flm);
    const double right = simpson(m, fm, fb, b, frm);
    if (depth <= 0 ||
        (min_depth <= 0 && std::abs(left + right - whole) <= 15.0 * tol))
        return left + right + (left + right - whole) / 15.0;
    return adaptive(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1, min_depth - 1) +
           adaptive(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1, min_depth - 1);
}
}  // namespace detail

/// Adaptive Simpson quadrature with a forced initial subdivision depth.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int min_depth = 8) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = detail::simpson(a, fa, fb, b, fm);
    return detail::adaptive(f, a, fa, b, fb, m, fm, whole, tol, 48, min_depth);
}

/// Fixed 8-point Gauss-Legendre on [a,b]: exact for polynomial degree <= 15.
inline double gauss8(const std::function<double(double)>& f, double a, double b) {
    static const double xs[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                 0.9602898564975363};
    static const double ws[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                 0.1012285362903763};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += ws[k] * (f(c - h * xs[k]) + f(c + h * xs[k]));
    return s * h;
}

/// Piecewise Gauss-Legendre between breakpoints: exact for splines.
inline double integrate_piecewise(const std::function<double(double)>& f,
                                  const std::vector<double>& breaks, double a, double b) {
    if (!(b > a)) return 0.0;
    std::vector<double> pts{a};
    for (double t : breaks)
        if (t > a && t < b) pts.push_back(t);
    pts.push_back(b);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) s += gauss8(f, pts[i], pts[i + 1]);
    return s;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace oracle
