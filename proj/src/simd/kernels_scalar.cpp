// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include "credence/simd/kernels.hpp"

namespace credence::simd {
namespace {

double dot_ref(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void gemv_ref(const double* a, std::size_t rows, std::size_t cols,
              const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_ref(a + r * cols, x, cols);
}

void gemv_t_ref(const double* a, std::size_t rows, std::size_t cols,
                const double* x, double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    const double xr = x[r];
    for (std::size_t c = 0; c < cols; ++c) y[c] += xr * row[c];
  }
}

void weighted_gram_ref(const double* a, std::size_t rows, std::size_t cols,
                       const double* w, double* g) {
  for (std::size_t i = 0; i < cols * cols; ++i) g[i] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    for (std::size_t i = 0; i < cols; ++i) {
      const double s = w[r] * row[i];
      double* gi = g + i * cols;
      for (std::size_t j = i; j < cols; ++j) gi[j] += s * row[j];
    }
  }
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = 0; j < i; ++j) g[i * cols + j] = g[j * cols + i];
}

void row_quadratic_forms_ref(const double* a, std::size_t rows,
                             std::size_t cols, const double* s, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    double q = 0.0;
    for (std::size_t i = 0; i < cols; ++i)
      q += row[i] * dot_ref(s + i * cols, row, cols);
    out[r] = q;
  }
}

}  // namespace

namespace detail {
const KernelTable scalar_table = {dot_ref, gemv_ref, gemv_t_ref,
                                  weighted_gram_ref, row_quadratic_forms_ref};
}  // namespace detail

}  // namespace credence::simd
