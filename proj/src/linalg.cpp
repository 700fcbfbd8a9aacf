// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include "credence/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "credence/error.hpp"
#include "credence/simd/kernels.hpp"

namespace credence {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) t(c, r) = a(r, c);
  return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    fail(ErrorCode::DimensionMismatch, "matrix product: inner dimensions differ");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

namespace {
Matrix elementwise(const Matrix& a, const Matrix& b, double sign) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorCode::DimensionMismatch, "matrix sum: shapes differ");
  Matrix out = a;
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
    out.data()[i] += sign * b.data()[i];
  return out;
}
}  // namespace

Matrix add(const Matrix& a, const Matrix& b) { return elementwise(a, b, 1.0); }
Matrix subtract(const Matrix& a, const Matrix& b) { return elementwise(a, b, -1.0); }

Vector multiply(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size())
    fail(ErrorCode::DimensionMismatch, "matrix-vector product: size mismatch");
  Vector y(a.rows());
  simd::kernels().gemv(a.data(), a.rows(), a.cols(), x.data(), y.data());
  return y;
}

Vector multiply_transposed(const Matrix& a, std::span<const double> x) {
  if (a.rows() != x.size())
    fail(ErrorCode::DimensionMismatch, "transposed product: size mismatch");
  Vector y(a.cols());
  simd::kernels().gemv_t(a.data(), a.rows(), a.cols(), x.data(), y.data());
  return y;
}

Matrix weighted_gram(const Matrix& a, std::span<const double> w) {
  if (a.rows() != w.size())
    fail(ErrorCode::DimensionMismatch, "weighted gram: size mismatch");
  Matrix g(a.cols(), a.cols());
  simd::kernels().weighted_gram(a.data(), a.rows(), a.cols(), w.data(), g.data());
  return g;
}

Vector row_quadratic_forms(const Matrix& a, const Matrix& s) {
  if (s.rows() != a.cols() || s.cols() != a.cols())
    fail(ErrorCode::DimensionMismatch, "quadratic forms: size mismatch");
  Vector out(a.rows());
  simd::kernels().row_quadratic_forms(a.data(), a.rows(), a.cols(), s.data(),
                                      out.data());
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::DimensionMismatch, "dot: size mismatch");
  return simd::kernels().dot(a.data(), b.data(), a.size());
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool is_symmetric(const Matrix& s, double rel_tol) {
  if (s.rows() != s.cols()) return false;
  double scale = 0.0;
  for (std::size_t i = 0; i < s.rows() * s.cols(); ++i)
    scale = std::max(scale, std::abs(s.data()[i]));
  const double tol = rel_tol * std::max(scale, 1e-300);
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(s(i, j) - s(j, i)) > tol) return false;
  return true;
}

Cholesky::Cholesky(const Matrix& s) : lower_(s.rows(), s.cols()) {
  if (s.rows() != s.cols())
    fail(ErrorCode::DimensionMismatch, "cholesky: matrix is not square");
  const std::size_t n = s.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= lower_(j, k) * lower_(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) {
      std::ostringstream msg;
      msg << "matrix is not positive definite (pivot " << j << " = " << d
          << "); the design may be singular or separated";
      fail(ErrorCode::NotPositiveDefinite, msg.str());
    }
    const double ljj = std::sqrt(d);
    lower_(j, j) = ljj;
    log_det_ += 2.0 * std::log(ljj);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= lower_(i, k) * lower_(j, k);
      lower_(i, j) = v / ljj;
    }
  }
}

Vector Cholesky::solve(std::span<const double> b) const {
  const std::size_t n = dim();
  if (b.size() != n) fail(ErrorCode::DimensionMismatch, "cholesky solve: size mismatch");
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= lower_(i, k) * y[k];
    y[i] /= lower_(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) y[i] -= lower_(k, i) * y[k];
    y[i] /= lower_(i, i);
  }
  return y;
}

Matrix Cholesky::solve(const Matrix& b) const {
  Matrix out(b.rows(), b.cols());
  Vector col(b.rows());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t r = 0; r < b.rows(); ++r) col[r] = b(r, c);
    const Vector x = solve(col);
    for (std::size_t r = 0; r < b.rows(); ++r) out(r, c) = x[r];
  }
  return out;
}

Matrix Cholesky::inverse() const {
  Matrix inv = solve(Matrix::identity(dim()));
  // symmetrize rounding noise
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double v = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = v;
      inv(j, i) = v;
    }
  return inv;
}

bool is_positive_semidefinite(const Matrix& s, double rel_eps) {
  if (s.rows() != s.cols() || !is_symmetric(s, 1e-9)) return false;
  double scale = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) scale = std::max(scale, std::abs(s(i, i)));
  Matrix shifted = s;
  const double eps = rel_eps * std::max(scale, 1.0);
  for (std::size_t i = 0; i < s.rows(); ++i) shifted(i, i) += eps;
  try {
    Cholesky chol(shifted);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace credence
