#include "gtreg/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gtreg/errors.hpp"

namespace gtreg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_basis_spec(const BasisSpec& b, bool is_y) {
    if (b.kind == BasisKind::linear) return;
    if (b.degree < 1) throw SpecError("b-spline degree must be >= 1");
    if (!b.knots.empty()) {
        // ascending; end-knot repetition up to degree+1 (clamped vectors)
        int run = 1;
        for (std::size_t i = 1; i < b.knots.size(); ++i) {
            if (b.knots[i] < b.knots[i - 1]) throw SpecError("knots must be ascending");
            run = (b.knots[i] == b.knots[i - 1]) ? run + 1 : 1;
            if (run > b.degree + 1) throw SpecError("knot multiplicity exceeds degree+1");
        }
        if (!(b.knots.back() > b.knots.front())) throw SpecError("knot span is degenerate");
        if (int(b.knots.size()) < b.degree + 2)
            throw SpecError("need at least degree+2 knots");
        if (is_y) {
            // the y-derivative basis must stay continuous on R: no clamping
            for (std::size_t i = 1; i < b.knots.size(); ++i)
                if (!(b.knots[i] > b.knots[i - 1]))
                    throw SpecError("y-basis knots must be strictly ascending");
        }
    } else if (b.dim <= 0) {
        throw SpecError("b-spline basis needs explicit knots or a positive dim");
    }
}
}  // namespace

bool Standardization::is_identity() const {
    if (y_mean != 0.0 || y_sd != 1.0) return false;
    for (double m : x_means)
        if (m != 0.0) return false;
    for (double s : x_sds)
        if (s != 1.0) return false;
    return true;
}

Dictionary::Dictionary(const DictionarySpec& spec, const Standardization& std_map,
                       int n_covariates, double y_lo_std, double y_hi_std, double x_lo_std,
                       double x_hi_std)
    : spec_(spec), std_(std_map), n_cov_(n_covariates) {
    check_basis_spec(spec_.x_basis, false);
    check_basis_spec(spec_.y_basis, true);
    if (n_cov_ < 1) throw SpecError("need at least one covariate");

    if (spec_.x_basis.kind == BasisKind::linear) {
        K_ = 1 + n_cov_;
    } else {
        if (n_cov_ != 1) throw SpecError("b-spline x-basis supports a single covariate");
        if (spec_.x_basis.knots.empty()) {
            const int count = spec_.x_basis.dim;  // clamped basis size K, first dropped
            if (count < spec_.x_basis.degree + 1)
                throw SpecError("x-basis dim must be at least degree+1");
            w_spline_ = BsplineBasis::clamped(x_lo_std, x_hi_std, count, spec_.x_basis.degree);
        } else {
            w_spline_ = BsplineBasis(spec_.x_basis.knots, spec_.x_basis.degree);
        }
        K_ = w_spline_->size();  // intercept + (size-1) kept splines
        spec_.x_basis.dim = K_;
        spec_.x_basis.knots = w_spline_->knots();
    }

    if (spec_.y_basis.kind == BasisKind::linear) {
        J_ = 2;
    } else {
        if (spec_.y_basis.knots.empty()) {
            const int count = spec_.y_basis.dim - 2;
            if (count < 1) throw SpecError("b-spline y-basis dim must be at least 3");
            s_spline_ = BsplineBasis::uniform_open(y_lo_std, y_hi_std, count, spec_.y_basis.degree);
        } else {
            s_spline_ = BsplineBasis(spec_.y_basis.knots, spec_.y_basis.degree);
        }
        J_ = 2 + s_spline_->size();
        spec_.y_basis.dim = J_;
        spec_.y_basis.knots = s_spline_->knots();
        s_mass_.resize(s_spline_->size());
        for (int j = 0; j < s_spline_->size(); ++j) s_mass_[j] = s_spline_->mass(j);
    }
    if (J_ < 2 || K_ < 1) throw SpecError("dictionary needs J >= 2 and K >= 1");
}

void Dictionary::eval_w(std::span<const double> x_std, std::span<double> out) const {
    out[0] = 1.0;
    if (spec_.x_basis.kind == BasisKind::linear) {
        for (int p = 0; p < n_cov_; ++p) out[1 + p] = x_std[p];
        return;
    }
    // clamped basis of size K; the first function is dropped (it is linearly
    // dependent with the intercept on the knot span).
    std::vector<double> buf(w_spline_->size());
    w_spline_->eval(x_std[0], buf);
    for (int k = 1; k < K_; ++k) out[k] = buf[k];
}

void Dictionary::eval_S(double y_std, std::span<double> out) const {
    out[0] = 1.0;
    out[1] = y_std;
    if (!s_spline_) return;
    std::vector<double> buf(s_spline_->size());
    s_spline_->eval_integral(y_std, buf);
    for (int j = 0; j < s_spline_->size(); ++j) out[2 + j] = buf[j] / s_mass_[j];
}

void Dictionary::eval_s(double y_std, std::span<double> out) const {
    out[0] = 0.0;
    out[1] = 1.0;
    if (!s_spline_) return;
    std::vector<double> buf(s_spline_->size());
    s_spline_->eval(y_std, buf);
    for (int j = 0; j < s_spline_->size(); ++j) out[2 + j] = buf[j] / s_mass_[j];
}

void Dictionary::eval_T_std(std::span<const double> x_std, double y_std,
                            std::span<double> out) const {
    std::vector<double> w(K_), S(J_);
    eval_w(x_std, w);
    eval_S(y_std, S);
    for (int k = 0; k < K_; ++k)
        for (int j = 0; j < J_; ++j) out[k * J_ + j] = w[k] * S[j];
}

void Dictionary::eval_t_std(std::span<const double> x_std, double y_std,
                            std::span<double> out) const {
    std::vector<double> w(K_), s(J_);
    eval_w(x_std, w);
    eval_s(y_std, s);
    for (int k = 0; k < K_; ++k)
        for (int j = 0; j < J_; ++j) out[k * J_ + j] = w[k] * s[j];
}

Vector Dictionary::x_to_std(std::span<const double> x_raw) const {
    if (int(x_raw.size()) != n_cov_) throw DimensionError("covariate vector has wrong length");
    Vector out(n_cov_);
    for (int p = 0; p < n_cov_; ++p) {
        const double m = p < int(std_.x_means.size()) ? std_.x_means[p] : 0.0;
        const double s = p < int(std_.x_sds.size()) ? std_.x_sds[p] : 1.0;
        out[p] = (x_raw[p] - m) / s;
    }
    return out;
}

Vector Dictionary::eval_T(std::span<const double> x_raw, double y_raw) const {
    Vector out(size());
    const Vector xs = x_to_std(x_raw);
    eval_T_std(xs, std_.y_to_std(y_raw), out);
    return out;
}

Vector Dictionary::eval_t(std::span<const double> x_raw, double y_raw) const {
    Vector out(size());
    const Vector xs = x_to_std(x_raw);
    eval_t_std(xs, std_.y_to_std(y_raw), out);
    return out;
}

double Dictionary::y_knot_lo() const { return s_spline_ ? s_spline_->min_knot() : -kInf; }
double Dictionary::y_knot_hi() const { return s_spline_ ? s_spline_->max_knot() : kInf; }

DictionarySpec Dictionary::resolved_spec() const { return spec_; }

namespace {

Standardization compute_standardization(const DataSet& data, bool standardize) {
    const int n = data.n();
    const int p = data.x.cols();
    Standardization s;
    s.x_means.assign(p, 0.0);
    s.x_sds.assign(p, 1.0);
    if (!standardize) return s;
    double ym = 0.0;
    for (double v : data.y) ym += v;
    ym /= n;
    double yv = 0.0;
    for (double v : data.y) yv += (v - ym) * (v - ym);
    yv /= n;
    s.y_mean = ym;
    s.y_sd = yv > 0.0 ? std::sqrt(yv) : 1.0;
    for (int c = 0; c < p; ++c) {
        double m = 0.0;
        for (int i = 0; i < n; ++i) m += data.x(i, c);
        m /= n;
        double v = 0.0;
        for (int i = 0; i < n; ++i) v += (data.x(i, c) - m) * (data.x(i, c) - m);
        v /= n;
        s.x_means[c] = m;
        s.x_sds[c] = v > 0.0 ? std::sqrt(v) : 1.0;
    }
    return s;
}

void check_data(const DataSet& data) {
    if (data.n() == 0) throw DataError("empty sample");
    if (data.x.rows() != data.n()) throw DataError("x/y row count mismatch");
    if (data.x.cols() < 1) throw DataError("need at least one covariate column");
    for (int i = 0; i < data.n(); ++i) {
        if (!std::isfinite(data.y[i]))
            throw DataError("non-finite outcome at row " + std::to_string(i));
        for (int c = 0; c < data.x.cols(); ++c)
            if (!std::isfinite(data.x(i, c)))
                throw DataError("non-finite covariate at row " + std::to_string(i));
    }
}

}  // namespace

DesignMatrices evaluate_design(const Dictionary& dict, const DataSet& data) {
    check_data(data);
    const int n = data.n();
    const int jk = dict.size();
    DesignMatrices d;
    d.T = Matrix(n, jk);
    d.t = Matrix(n, jk);
    d.n = n;
    d.jk = jk;
    d.standardization = dict.standardization();
    Vector xrow(data.x.cols());
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < data.x.cols(); ++c) xrow[c] = data.x(i, c);
        const Vector xs = dict.x_to_std(xrow);
        const double ys = dict.standardization().y_to_std(data.y[i]);
        dict.eval_T_std(xs, ys, {d.T.row(i), std::size_t(jk)});
        dict.eval_t_std(xs, ys, {d.t.row(i), std::size_t(jk)});
    }
    return d;
}

BuildResult build_dictionary(const DictionarySpec& spec, const DataSet& data) {
    check_data(data);
    const Standardization smap = compute_standardization(data, spec.standardize);

    double ylo = kInf, yhi = -kInf;
    for (double v : data.y) {
        const double z = smap.y_to_std(v);
        ylo = std::min(ylo, z);
        yhi = std::max(yhi, z);
    }
    double xlo = kInf, xhi = -kInf;
    for (int i = 0; i < data.n(); ++i) {
        const double z = (data.x(i, 0) - smap.x_means[0]) / smap.x_sds[0];
        xlo = std::min(xlo, z);
        xhi = std::max(xhi, z);
    }
    if (!(yhi > ylo)) yhi = ylo + 1.0;
    if (!(xhi > xlo)) xhi = xlo + 1.0;

    Dictionary dict(spec, smap, data.x.cols(), ylo, yhi, xlo, xhi);
    return BuildResult{dict, evaluate_design(dict, data)};
}

Matrix coefficient_map_std_to_raw(const Dictionary& dict) {
    const auto& s = dict.standardization();
    const int K = dict.K(), J = dict.J();
    // m_w: w_std = m_w * w_raw
    Matrix mw = Matrix::identity(K);
    if (dict.spec().x_basis.kind == BasisKind::linear) {
        for (int p = 0; p < dict.n_covariates(); ++p) {
            mw(1 + p, 0) = -s.x_means[p] / s.x_sds[p];
            mw(1 + p, 1 + p) = 1.0 / s.x_sds[p];
        }
    }
    // m_s: S_std = m_s * S_raw ; only the linear component mixes
    Matrix ms = Matrix::identity(J);
    ms(1, 0) = -s.y_mean / s.y_sd;
    ms(1, 1) = 1.0 / s.y_sd;
    // kronecker product, index l = k*J + j
    Matrix m(K * J, K * J);
    for (int k = 0; k < K; ++k)
        for (int kp = 0; kp < K; ++kp) {
            if (mw(k, kp) == 0.0) continue;
            for (int j = 0; j < J; ++j)
                for (int jp = 0; jp < J; ++jp)
                    m(k * J + j, kp * J + jp) = mw(k, kp) * ms(j, jp);
        }
    return m;
}

Vector eval_T_rawbasis(const Dictionary& dict, std::span<const double> x_raw, double y_raw) {
    const int K = dict.K(), J = dict.J();
    const Vector xs = dict.x_to_std(x_raw);
    const double ys = dict.standardization().y_to_std(y_raw);
    Vector w(K), S(J);
    dict.eval_w(xs, w);
    dict.eval_S(ys, S);
    if (dict.spec().x_basis.kind == BasisKind::linear)
        for (int p = 0; p < dict.n_covariates(); ++p) w[1 + p] = x_raw[p];
    S[1] = y_raw;
    Vector out(K * J);
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < J; ++j) out[k * J + j] = w[k] * S[j];
    return out;
}

Dictionary resolve_dictionary(const DictionarySpec& spec, const Standardization& std_map,
                              int n_covariates) {
    if (spec.x_basis.kind == BasisKind::bspline && spec.x_basis.knots.empty())
        throw SpecError("resolve_dictionary needs explicit x knots");
    if (spec.y_basis.kind == BasisKind::bspline && spec.y_basis.knots.empty())
        throw SpecError("resolve_dictionary needs explicit y knots");
    return Dictionary(spec, std_map, n_covariates, 0.0, 1.0, 0.0, 1.0);
}

}  // namespace gtreg
