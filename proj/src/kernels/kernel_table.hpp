#pragma once

#include <cstddef>

namespace gtreg::kernels {

struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*rowwise_dot)(const double*, std::size_t, std::size_t, const double*, double*);
    void (*weighted_colsum)(const double*, std::size_t, std::size_t, const double*, double*);
    void (*weighted_gram)(const double*, std::size_t, std::size_t, const double*, double*);
};

const KernelTable& scalar_table();

#ifdef GTREG_HAVE_AVX2
const KernelTable& avx2_table();
#endif

}  // namespace gtreg::kernels
