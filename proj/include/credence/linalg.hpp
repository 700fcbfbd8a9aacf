// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0
//
// Small dense linear algebra for symmetric positive-definite systems of the
// size that appears in logistic models (tens of coefficients).

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace credence {

using Vector = std::vector<double>;

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix transpose(const Matrix& a);
Matrix multiply(const Matrix& a, const Matrix& b);
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);

/// A x, dispatched to the active SIMD kernels.
Vector multiply(const Matrix& a, std::span<const double> x);
/// A^T x
Vector multiply_transposed(const Matrix& a, std::span<const double> x);
/// A^T diag(w) A
Matrix weighted_gram(const Matrix& a, std::span<const double> w);
/// a_i^T S a_i for every row of A
Vector row_quadratic_forms(const Matrix& a, const Matrix& s);

double dot(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> v);

/// Symmetric to within rel_tol relative to the largest entry.
bool is_symmetric(const Matrix& s, double rel_tol = 1e-12);

/// Lower Cholesky factor of a symmetric positive-definite matrix.
class Cholesky {
 public:
  /// Throws Error{NotPositiveDefinite} when a pivot is not positive.
  explicit Cholesky(const Matrix& s);

  const Matrix& lower() const noexcept { return lower_; }
  double log_det() const noexcept { return log_det_; }
  std::size_t dim() const noexcept { return lower_.rows(); }

  Vector solve(std::span<const double> b) const;
  Matrix solve(const Matrix& b) const;
  Matrix inverse() const;

 private:
  Matrix lower_;
  double log_det_ = 0.0;
};

/// True when s + eps I is positive definite, eps scaled to the diagonal.
bool is_positive_semidefinite(const Matrix& s, double rel_eps = 1e-10);

}  // namespace credence
