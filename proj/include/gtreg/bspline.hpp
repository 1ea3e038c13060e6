#pragma once

#include <span>
#include <vector>

namespace gtreg {

/// B-spline basis on an explicit knot vector (repeats allowed, so clamped
/// vectors work). Values come from the Cox-de Boor triangle; running
/// integrals from the degree-elevation identity
///   int_{-inf}^x B_{j,d} = (t_{j+d+1}-t_j)/(d+1) * sum_{m>=j} B_{m,d+1}(x),
/// with the degree-(d+1) splines evaluated on a right-extended knot vector.
class BsplineBasis {
public:
    BsplineBasis(std::vector<double> knots, int degree);

    /// `count` basis functions of degree `degree` on equispaced knots over
    /// [lo, hi], no end-knot repetition: every function is continuous on R,
    /// nonnegative, and identically zero outside [lo, hi].
    static BsplineBasis uniform_open(double lo, double hi, int count, int degree);

    /// Clamped basis of `count` functions on [lo, hi] (end knots repeated
    /// degree+1 times); partition of unity on [lo, hi].
    static BsplineBasis clamped(double lo, double hi, int count, int degree);

    int size() const { return int(knots_.size()) - degree_ - 1; }
    int degree() const { return degree_; }
    const std::vector<double>& knots() const { return knots_; }
    double min_knot() const { return knots_.front(); }
    double max_knot() const { return knots_.back(); }

    /// All basis values at x into out (length size()). Zero outside the knot
    /// span except that a clamped basis is right-closed at the last knot.
    void eval(double x, std::span<double> out) const;

    /// Running integrals int_{-inf}^x B_j into out (length size()).
    void eval_integral(double x, std::span<double> out) const;

    /// Total mass int_R B_j = (t_{j+d+1} - t_j)/(d+1).
    double mass(int j) const { return (knots_[j + degree_ + 1] - knots_[j]) / (degree_ + 1); }

private:
    int span_of(double x, const std::vector<double>& t) const;
    std::vector<double> knots_;
    std::vector<double> ext_knots_;  // right-extended for the integral identity
    int degree_;
};

}  // namespace gtreg
