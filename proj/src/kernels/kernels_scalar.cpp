#include <cstddef>
#include <cstring>

#include "kernel_table.hpp"

// Reference kernels. Plain loops, sequential reduction order; these define
// the semantics the SIMD variants are tested against.

namespace gtreg::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += a[k] * b[k];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

void rowwise_dot_scalar(const double* a, std::size_t nrows, std::size_t ncols, const double* x,
                        double* out) {
    for (std::size_t i = 0; i < nrows; ++i) out[i] = dot_scalar(a + i * ncols, x, ncols);
}

void weighted_colsum_scalar(const double* a, std::size_t nrows, std::size_t ncols,
                            const double* w, double* out) {
    std::memset(out, 0, ncols * sizeof(double));
    for (std::size_t i = 0; i < nrows; ++i) axpy_scalar(w[i], a + i * ncols, out, ncols);
}

void weighted_gram_scalar(const double* a, std::size_t nrows, std::size_t ncols, const double* w,
                          double* out) {
    std::memset(out, 0, ncols * ncols * sizeof(double));
    for (std::size_t i = 0; i < nrows; ++i) {
        const double* row = a + i * ncols;
        const double wi = w[i];
        for (std::size_t j = 0; j < ncols; ++j) {
            const double c = wi * row[j];
            double* outj = out + j * ncols;
            for (std::size_t k = j; k < ncols; ++k) outj[k] += c * row[k];
        }
    }
    // mirror the upper triangle
    for (std::size_t j = 1; j < ncols; ++j)
        for (std::size_t k = 0; k < j; ++k) out[j * ncols + k] = out[k * ncols + j];
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{dot_scalar, axpy_scalar, rowwise_dot_scalar,
                                   weighted_colsum_scalar, weighted_gram_scalar};
    return table;
}

}  // namespace gtreg::kernels
