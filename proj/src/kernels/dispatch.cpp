#include "gtreg/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kernel_table.hpp"

namespace gtreg::kernels {

namespace {

bool avx2_supported() {
#if defined(GTREG_HAVE_AVX2) && (defined(__x86_64__) || defined(_M_X64))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

struct Active {
    const KernelTable* table;
    Isa isa;
};

Active detect() {
    const char* env = std::getenv("GTREG_KERNELS");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return {&scalar_table(), Isa::scalar};
#ifdef GTREG_HAVE_AVX2
    const bool want_avx2 = (env == nullptr) || std::strcmp(env, "avx2") == 0;
    if (want_avx2 && avx2_supported()) return {&avx2_table(), Isa::avx2};
#endif
    return {&scalar_table(), Isa::scalar};
}

std::atomic<const KernelTable*> g_table{nullptr};
std::atomic<Isa> g_isa{Isa::scalar};

const KernelTable& table() {
    const KernelTable* t = g_table.load(std::memory_order_acquire);
    if (t == nullptr) {
        Active a = detect();
        g_isa.store(a.isa, std::memory_order_relaxed);
        g_table.store(a.table, std::memory_order_release);
        t = a.table;
    }
    return *t;
}

}  // namespace

Isa active_isa() {
    table();
    return g_isa.load(std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool force_isa(Isa isa) {
    if (isa == Isa::scalar) {
        g_isa.store(Isa::scalar, std::memory_order_relaxed);
        g_table.store(&scalar_table(), std::memory_order_release);
        return true;
    }
#ifdef GTREG_HAVE_AVX2
    if (avx2_supported()) {
        g_isa.store(Isa::avx2, std::memory_order_relaxed);
        g_table.store(&avx2_table(), std::memory_order_release);
        return true;
    }
#endif
    return false;
}

double dot(const double* a, const double* b, std::size_t n) { return table().dot(a, b, n); }

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    table().axpy(alpha, x, y, n);
}

void rowwise_dot(const double* a, std::size_t nrows, std::size_t ncols, const double* x,
                 double* out) {
    table().rowwise_dot(a, nrows, ncols, x, out);
}

void weighted_colsum(const double* a, std::size_t nrows, std::size_t ncols, const double* w,
                     double* out) {
    table().weighted_colsum(a, nrows, ncols, w, out);
}

void weighted_gram(const double* a, std::size_t nrows, std::size_t ncols, const double* w,
                   double* out) {
    table().weighted_gram(a, nrows, ncols, w, out);
}

}  // namespace gtreg::kernels
