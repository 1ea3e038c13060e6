#pragma once

#include <span>
#include <vector>

namespace gtreg {

using Vector = std::vector<double>;

/// Dense row-major matrix. Dictionary sizes stay small (JK <= ~100), so all
/// factorizations below are plain dense algebra.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols, 0.0) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return a_.empty(); }

    double* row(int i) { return a_.data() + std::size_t(i) * cols_; }
    const double* row(int i) const { return a_.data() + std::size_t(i) * cols_; }

    double& operator()(int i, int j) { return a_[std::size_t(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[std::size_t(i) * cols_ + j]; }

    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

/// In-place lower Cholesky of an SPD matrix; false on a non-positive pivot.
bool cholesky(Matrix& a);

/// Solves L L' x = b given the Cholesky factor from cholesky().
void cholesky_solve(const Matrix& l, std::span<double> x);

/// Solves a x = b for symmetric positive definite a; false if not SPD.
bool solve_spd(Matrix a, const Vector& b, Vector& out);

struct SymEig {
    Vector values;   // ascending
    Matrix vectors;  // columns are eigenvectors
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
SymEig sym_eig(Matrix a);

/// Moore-Penrose pseudo-inverse of a symmetric matrix; eigenvalues with
/// |lambda| <= rcond * max|lambda| are dropped. Sets *truncated when any
/// eigenvalue was dropped.
Matrix pinv_sym(const Matrix& a, double rcond, bool* truncated = nullptr);

Matrix mat_mul(const Matrix& a, const Matrix& b);
void mat_vec(const Matrix& a, std::span<const double> x, std::span<double> out);
double quad_form(const Matrix& a, std::span<const double> x);  // x' a x
double frobenius_norm(const Matrix& a);

double norm_inf(std::span<const double> v);
double norm2(std::span<const double> v);

}  // namespace gtreg
