#include "gtreg/bspline.hpp"

#include <algorithm>
#include <cmath>

#include "gtreg/errors.hpp"

namespace gtreg {

namespace {

// Cox-de Boor triangle around span i of knot vector t: fills vals[r] =
// B_{i-d+r,d}(x) for r in 0..d. Out-of-range global indices are evaluated
// against virtually clamped end knots and must be discarded by the caller.
void basis_triangle(const std::vector<double>& t, int i, int d, double x, double* vals) {
    const int nk = int(t.size());
    auto knot = [&](int idx) { return t[std::clamp(idx, 0, nk - 1)]; };
    std::vector<double> left(d + 1), right(d + 1);
    vals[0] = 1.0;
    for (int j = 1; j <= d; ++j) {
        left[j] = x - knot(i + 1 - j);
        right[j] = knot(i + j) - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double den = right[r + 1] + left[j - r];
            const double temp = (den != 0.0) ? vals[r] / den : 0.0;
            vals[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        vals[j] = saved;
    }
}

}  // namespace

BsplineBasis::BsplineBasis(std::vector<double> knots, int degree)
    : knots_(std::move(knots)), degree_(degree) {
    if (degree_ < 1) throw SpecError("b-spline degree must be >= 1");
    if (int(knots_.size()) < degree_ + 2)
        throw SpecError("b-spline needs at least degree+2 knots");
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (knots_[i] < knots_[i - 1]) throw SpecError("b-spline knots must be non-decreasing");
        if (!std::isfinite(knots_[i - 1]) || !std::isfinite(knots_[i]))
            throw SpecError("b-spline knots must be finite");
    }
    if (!(knots_.back() > knots_.front())) throw SpecError("b-spline knot span is degenerate");

    ext_knots_ = knots_;
    double h = 0.0;
    for (std::size_t i = knots_.size(); i-- > 1;) {
        h = knots_[i] - knots_[i - 1];
        if (h > 0.0) break;
    }
    if (h <= 0.0) h = 1.0;
    for (int k = 0; k < degree_ + 2; ++k) ext_knots_.push_back(knots_.back() + (k + 1) * h);
}

BsplineBasis BsplineBasis::uniform_open(double lo, double hi, int count, int degree) {
    if (count < 1) throw SpecError("b-spline basis count must be >= 1");
    const int nk = count + degree + 1;
    std::vector<double> t(nk);
    for (int i = 0; i < nk; ++i) t[i] = lo + (hi - lo) * double(i) / double(nk - 1);
    return BsplineBasis(std::move(t), degree);
}

BsplineBasis BsplineBasis::clamped(double lo, double hi, int count, int degree) {
    const int intervals = count - degree;
    if (intervals < 1) throw SpecError("clamped b-spline basis needs count >= degree+1");
    std::vector<double> t;
    t.reserve(count + degree + 1);
    for (int i = 0; i <= degree; ++i) t.push_back(lo);
    for (int i = 1; i < intervals; ++i) t.push_back(lo + (hi - lo) * double(i) / intervals);
    for (int i = 0; i <= degree; ++i) t.push_back(hi);
    return BsplineBasis(std::move(t), degree);
}

int BsplineBasis::span_of(double x, const std::vector<double>& t) const {
    if (x >= t[t.size() - 1]) {
        // last nonempty span (right closure for clamped vectors)
        int i = int(t.size()) - 2;
        while (i > 0 && t[i] == t[i + 1]) --i;
        return i;
    }
    auto it = std::upper_bound(t.begin(), t.end(), x);
    return int(it - t.begin()) - 1;
}

void BsplineBasis::eval(double x, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (x < knots_.front() || x > knots_.back()) return;
    const int i = span_of(x, knots_);
    std::vector<double> vals(degree_ + 1);
    basis_triangle(knots_, i, degree_, x, vals.data());
    for (int r = 0; r <= degree_; ++r) {
        const int j = i - degree_ + r;
        if (j >= 0 && j < size()) out[j] = vals[r];
    }
}

void BsplineBasis::eval_integral(double x, std::span<double> out) const {
    const int n = size();
    if (x <= knots_.front()) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    if (x >= knots_.back()) {
        for (int j = 0; j < n; ++j) out[j] = mass(j);
        return;
    }
    const int d1 = degree_ + 1;
    const int i = span_of(x, ext_knots_);
    std::vector<double> vals(d1 + 1);
    basis_triangle(ext_knots_, i, d1, x, vals.data());
    // partial sums of degree-(d+1) values, indices m in [i-d1, i]
    for (int j = 0; j < n; ++j) {
        if (knots_[j] >= x) {
            out[j] = 0.0;
        } else if (knots_[j + degree_ + 1] <= x) {
            out[j] = mass(j);
        } else {
            double s = 0.0;
            for (int m = std::max(j, i - d1); m <= i; ++m) {
                const int r = m - (i - d1);
                if (r >= 0 && r <= d1 && m >= 0) s += vals[r];
            }
            out[j] = mass(j) * s;
        }
    }
}

}  // namespace gtreg
