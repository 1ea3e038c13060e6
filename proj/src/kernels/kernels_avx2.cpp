// AVX2+FMA kernels. Compiled with -mavx2 -mfma on x86-64 only; selected at
// runtime when the CPU reports both features.

#ifdef GTREG_HAVE_AVX2

#include <immintrin.h>

#include <cstddef>
#include <cstring>

#include "kernel_table.hpp"

namespace gtreg::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), acc1);
    }
    if (k + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
        k += 4;
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; k < n; ++k) acc += a[k] * b[k];
    return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4)
        _mm256_storeu_pd(y + k, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
    for (; k < n; ++k) y[k] += alpha * x[k];
}

void rowwise_dot_avx2(const double* a, std::size_t nrows, std::size_t ncols, const double* x,
                      double* out) {
    for (std::size_t i = 0; i < nrows; ++i) out[i] = dot_avx2(a + i * ncols, x, ncols);
}

void weighted_colsum_avx2(const double* a, std::size_t nrows, std::size_t ncols, const double* w,
                          double* out) {
    std::memset(out, 0, ncols * sizeof(double));
    for (std::size_t i = 0; i < nrows; ++i) axpy_avx2(w[i], a + i * ncols, out, ncols);
}

void weighted_gram_avx2(const double* a, std::size_t nrows, std::size_t ncols, const double* w,
                        double* out) {
    std::memset(out, 0, ncols * ncols * sizeof(double));
    for (std::size_t i = 0; i < nrows; ++i) {
        const double* row = a + i * ncols;
        const double wi = w[i];
        for (std::size_t j = 0; j < ncols; ++j) {
            axpy_avx2(wi * row[j], row + j, out + j * ncols + j, ncols - j);
        }
    }
    for (std::size_t j = 1; j < ncols; ++j)
        for (std::size_t k = 0; k < j; ++k) out[j * ncols + k] = out[k * ncols + j];
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{dot_avx2, axpy_avx2, rowwise_dot_avx2, weighted_colsum_avx2,
                                   weighted_gram_avx2};
    return table;
}

}  // namespace gtreg::kernels

#endif  // GTREG_HAVE_AVX2
