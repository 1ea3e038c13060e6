#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the likelihood, score, and Hessian
// assembly: row dot products, weighted column sums, and weighted Gram
// accumulation. A scalar reference implementation is always available;
// an AVX2+FMA variant is selected at runtime on x86-64 hosts that
// support it. The two paths agree to ~1e-14 relative (FMA reassociates
// the reductions) and are equivalence-tested against each other.
//
// Set GTREG_KERNELS=scalar (or avx2) in the environment to pin a path.

namespace gtreg::kernels {

enum class Isa { scalar, avx2 };

/// Instruction set backing the currently active kernel table.
Isa active_isa();

std::string_view isa_name(Isa isa);

/// Pin the kernel table for this process. Returns false when `isa` is not
/// supported on this host (the table is left unchanged).
bool force_isa(Isa isa);

/// Sum_k a[k] * b[k].
double dot(const double* a, const double* b, std::size_t n);

/// y[k] += alpha * x[k].
void axpy(double alpha, const double* x, double* y, std::size_t n);

/// out[i] = dot(row i of a, x); a is row-major nrows x ncols.
void rowwise_dot(const double* a, std::size_t nrows, std::size_t ncols, const double* x,
                 double* out);

/// out[j] = sum_i w[i] * a[i][j]  (i.e. out = A' w); out has length ncols.
void weighted_colsum(const double* a, std::size_t nrows, std::size_t ncols, const double* w,
                     double* out);

/// out = sum_i w[i] * a_i a_i'; out is a full symmetric row-major
/// ncols x ncols matrix, overwritten.
void weighted_gram(const double* a, std::size_t nrows, std::size_t ncols, const double* w,
                   double* out);

}  // namespace gtreg::kernels
