#include "gtreg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtreg/kernels.hpp"

namespace gtreg {

bool cholesky(Matrix& a) {
    const int n = a.rows();
    for (int j = 0; j < n; ++j) {
        double d = a(j, j) - kernels::dot(a.row(j), a.row(j), j);
        if (!(d > 0.0)) return false;
        d = std::sqrt(d);
        a(j, j) = d;
        for (int i = j + 1; i < n; ++i)
            a(i, j) = (a(i, j) - kernels::dot(a.row(i), a.row(j), j)) / d;
        for (int k = j + 1; k < n; ++k) a(j, k) = 0.0;
    }
    return true;
}

void cholesky_solve(const Matrix& l, std::span<double> x) {
    const int n = l.rows();
    for (int i = 0; i < n; ++i)
        x[i] = (x[i] - kernels::dot(l.row(i), x.data(), i)) / l(i, i);
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
}

bool solve_spd(Matrix a, const Vector& b, Vector& out) {
    if (!cholesky(a)) return false;
    out = b;
    cholesky_solve(a, out);
    return true;
}

SymEig sym_eig(Matrix a) {
    const int n = a.rows();
    Matrix v = Matrix::identity(n);
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    SymEig out;
    out.values.resize(n);
    for (int i = 0; i < n; ++i) out.values[i] = a(i, i);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return out.values[i] < out.values[j]; });
    SymEig sorted;
    sorted.values.resize(n);
    sorted.vectors = Matrix(n, n);
    for (int c = 0; c < n; ++c) {
        sorted.values[c] = out.values[order[c]];
        for (int r = 0; r < n; ++r) sorted.vectors(r, c) = v(r, order[c]);
    }
    return sorted;
}

Matrix pinv_sym(const Matrix& a, double rcond, bool* truncated) {
    SymEig eig = sym_eig(a);
    const int n = a.rows();
    double amax = 0.0;
    for (double lam : eig.values) amax = std::max(amax, std::abs(lam));
    const double cut = rcond * amax;
    bool any_dropped = false;
    Matrix out(n, n);
    for (int k = 0; k < n; ++k) {
        const double lam = eig.values[k];
        if (std::abs(lam) <= cut) {
            any_dropped = true;
            continue;
        }
        const double inv = 1.0 / lam;
        for (int i = 0; i < n; ++i) {
            const double vik = eig.vectors(i, k) * inv;
            for (int j = 0; j < n; ++j) out(i, j) += vik * eig.vectors(j, k);
        }
    }
    if (truncated != nullptr) *truncated = any_dropped;
    return out;
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            kernels::axpy(aik, b.row(k), out.row(i), b.cols());
        }
    }
    return out;
}

void mat_vec(const Matrix& a, std::span<const double> x, std::span<double> out) {
    kernels::rowwise_dot(a.data(), a.rows(), a.cols(), x.data(), out.data());
}

double quad_form(const Matrix& a, std::span<const double> x) {
    double acc = 0.0;
    for (int i = 0; i < a.rows(); ++i) acc += x[i] * kernels::dot(a.row(i), x.data(), a.cols());
    return acc;
}

double frobenius_norm(const Matrix& a) {
    return norm2({a.data(), std::size_t(a.rows()) * a.cols()});
}

double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace gtreg
