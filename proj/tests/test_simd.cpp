// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "credence/linalg.hpp"
#include "credence/simd/kernels.hpp"

using namespace credence;
using simd::Isa;

namespace {

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

/// Textbook triple loops, independent of both kernel tables.
std::vector<double> naive_gram(const std::vector<double>& a, std::size_t rows, std::size_t cols,
                               const std::vector<double>& w) {
  std::vector<double> g(cols * cols, 0.0);
  for (std::size_t r = 0; r < cols; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      for (std::size_t i = 0; i < rows; ++i) g[r * cols + c] += a[i * cols + r] * w[i] * a[i * cols + c];
  return g;
}

}  // namespace

TEST_CASE("scalar kernels match naive loops") {
  std::mt19937_64 rng(7);
  const auto& k = simd::kernels(Isa::Scalar);
  for (std::size_t rows : {1u, 3u, 17u, 64u}) {
    for (std::size_t cols : {1u, 2u, 5u, 9u}) {
      const auto a = random_values(rng, rows * cols);
      auto w = random_values(rng, rows);
      for (double& x : w) x = std::abs(x);
      std::vector<double> g(cols * cols);
      k.weighted_gram(a.data(), rows, cols, w.data(), g.data());
      const auto ref = naive_gram(a, rows, cols, w);
      for (std::size_t i = 0; i < g.size(); ++i) CHECK(rel_err(g[i], ref[i]) < 1e-12);
    }
  }
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  if (!simd::isa_supported(Isa::Avx2)) {
    MESSAGE("AVX2 not available on this CPU; equivalence test skipped");
    return;
  }
  const auto& s = simd::kernels(Isa::Scalar);
  const auto& v = simd::kernels(Isa::Avx2);
  std::mt19937_64 rng(11);
  // sizes cover empty, sub-vector, exact multiples and ragged tails
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 16u, 33u, 257u, 1000u}) {
    const auto a = random_values(rng, n), b = random_values(rng, n);
    CHECK(rel_err(v.dot(a.data(), b.data(), n), s.dot(a.data(), b.data(), n)) < 1e-12);
  }
  for (std::size_t rows : {1u, 2u, 5u, 31u, 100u}) {
    for (std::size_t cols : {1u, 3u, 4u, 6u, 11u, 17u}) {
      const auto a = random_values(rng, rows * cols);
      const auto x = random_values(rng, cols);
      const auto xr = random_values(rng, rows);
      auto w = random_values(rng, rows);
      for (double& e : w) e = std::abs(e);
      auto sm = random_values(rng, cols * cols);
      for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t j = 0; j < i; ++j) sm[i * cols + j] = sm[j * cols + i];

      std::vector<double> y1(rows), y2(rows);
      s.gemv(a.data(), rows, cols, x.data(), y1.data());
      v.gemv(a.data(), rows, cols, x.data(), y2.data());
      for (std::size_t i = 0; i < rows; ++i) CHECK(rel_err(y2[i], y1[i]) < 1e-12);

      std::vector<double> t1(cols), t2(cols);
      s.gemv_t(a.data(), rows, cols, xr.data(), t1.data());
      v.gemv_t(a.data(), rows, cols, xr.data(), t2.data());
      for (std::size_t j = 0; j < cols; ++j) CHECK(rel_err(t2[j], t1[j]) < 1e-12);

      std::vector<double> g1(cols * cols), g2(cols * cols);
      s.weighted_gram(a.data(), rows, cols, w.data(), g1.data());
      v.weighted_gram(a.data(), rows, cols, w.data(), g2.data());
      for (std::size_t i = 0; i < g1.size(); ++i) CHECK(rel_err(g2[i], g1[i]) < 1e-12);
      for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t j = 0; j < cols; ++j) CHECK(g2[i * cols + j] == g2[j * cols + i]);

      std::vector<double> q1(rows), q2(rows);
      s.row_quadratic_forms(a.data(), rows, cols, sm.data(), q1.data());
      v.row_quadratic_forms(a.data(), rows, cols, sm.data(), q2.data());
      for (std::size_t i = 0; i < rows; ++i) CHECK(rel_err(q2[i], q1[i]) < 1e-11);
    }
  }
}

TEST_CASE("forcing the scalar path changes results only by rounding") {
  std::mt19937_64 rng(3);
  Matrix a(40, 7);
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t j = 0; j < 7; ++j) a(i, j) = std::normal_distribution<double>()(rng);
  const Vector w(40, 0.5);
  const Isa before = simd::active_isa();
  simd::force_isa(Isa::Scalar);
  CHECK(simd::active_isa() == Isa::Scalar);
  const Matrix g_scalar = weighted_gram(a, w);
  simd::force_isa(before);
  const Matrix g_active = weighted_gram(a, w);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j) CHECK(rel_err(g_active(i, j), g_scalar(i, j)) < 1e-12);
  CHECK(std::string(simd::isa_name(Isa::Scalar)) == "scalar");
}
