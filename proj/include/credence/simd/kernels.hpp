// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense double-precision inner loops used by the fitters and the batch
// prediction path. Each kernel has a scalar reference implementation and,
// on x86-64, an AVX2+FMA variant. The variant is chosen once at runtime from
// CPUID; CREDENCE_SIMD=scalar in the environment forces the reference path.
//
// All matrices are row-major and contiguous.

#pragma once

#include <cstddef>

namespace credence::simd {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);

struct KernelTable {
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y = A x, A is rows x cols
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols,
               const double* x, double* y);
  /// y = A^T x, A is rows x cols, y has cols entries
  void (*gemv_t)(const double* a, std::size_t rows, std::size_t cols,
                 const double* x, double* y);
  /// G = A^T diag(w) A, G is cols x cols (full, symmetric)
  void (*weighted_gram)(const double* a, std::size_t rows, std::size_t cols,
                        const double* w, double* g);
  /// out[i] = a_i^T S a_i for every row a_i of A; S is cols x cols
  void (*row_quadratic_forms)(const double* a, std::size_t rows,
                              std::size_t cols, const double* s, double* out);
};

/// True when the running CPU can execute the given variant.
bool isa_supported(Isa isa);

/// The variant selected at startup (or forced, see force_isa).
Isa active_isa();

/// Overrides the selection for the whole process. Throws if unsupported.
void force_isa(Isa isa);

const KernelTable& kernels();
const KernelTable& kernels(Isa isa);

namespace detail {
extern const KernelTable scalar_table;
#if defined(CREDENCE_HAVE_AVX2_KERNELS)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace credence::simd
