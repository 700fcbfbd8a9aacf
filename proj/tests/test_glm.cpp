// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "support.hpp"

#include "credence/error.hpp"
#include "credence/glm.hpp"

using namespace credence;
using namespace credence::testing;

namespace {

Dataset from_rows(const std::vector<std::vector<double>>& x, const Vector& y, Vector w = {}) {
  Dataset ds;
  ds.x = Matrix(x.size(), x[0].size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x[0].size(); ++j) ds.x(i, j) = x[i][j];
  for (std::size_t j = 1; j < x[0].size(); ++j) ds.terms.push_back({"x" + std::to_string(j), TermKind::Continuous, {}});
  ds.y = y;
  ds.w = w.empty() ? Vector(x.size(), 1.0) : w;
  return ds;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("sigmoid and logit are stable inverses") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(log_sigmoid(-800.0) == doctest::Approx(-800.0));
  CHECK(log_sigmoid(30.0) == doctest::Approx(-std::exp(-30.0)).epsilon(1e-6));
  for (double p : {1e-9, 0.1, 0.5, 0.9, 1 - 1e-9}) CHECK(sigmoid(logit(p)) == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("maximum likelihood matches an independent Newton oracle") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dataset ds = random_logistic_dataset(seed, 120, 3);
    const FitResult fit = fit_logistic(ds);
    CHECK(fit.converged);
    CHECK(fit.max_score <= 1e-8);
    const auto oracle = fd_newton_maximize([&](const std::vector<double>& b) { return ref_loglik(ds, b); },
                                           std::vector<double>(4, 0.0));
    for (std::size_t j = 0; j < 4; ++j) CHECK(fit.beta[j] == doctest::Approx(oracle[j]).epsilon(1e-5));
    CHECK(fit.deviance == doctest::Approx(-2.0 * ref_loglik(ds, fit.beta)).epsilon(1e-10));
    const auto I = ref_fisher(ds, fit.beta);
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) CHECK(fit.information(a, b) == doctest::Approx(I[a][b]).epsilon(1e-10));
  }
}

TEST_CASE("soft labels with weights") {
  Dataset ds = random_logistic_dataset(42, 80, 2);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 0.95), w(0.5, 2.0);
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    ds.y[i] = u(rng);
    ds.w[i] = w(rng);
  }
  const FitResult fit = fit_logistic(ds);
  const auto oracle = fd_newton_maximize([&](const std::vector<double>& b) { return ref_loglik(ds, b); },
                                         std::vector<double>(3, 0.0));
  for (std::size_t j = 0; j < 3; ++j) CHECK(fit.beta[j] == doctest::Approx(oracle[j]).epsilon(1e-5));
  // with an intercept the weighted score equation reproduces the soft-label total
  double obs = 0.0, exp = 0.0;
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    double eta = 0.0;
    for (std::size_t j = 0; j < 3; ++j) eta += ds.x(i, j) * fit.beta[j];
    obs += ds.w[i] * ds.y[i];
    exp += ds.w[i] * ref_sigmoid(eta);
  }
  CHECK(exp == doctest::Approx(obs).epsilon(1e-9));
}

TEST_CASE("complete separation is reported") {
  const Dataset ds = from_rows({{1, -2}, {1, -1}, {1, -0.5}, {1, 0.5}, {1, 1}, {1, 2}}, {0, 0, 0, 1, 1, 1});
  CHECK(code_of([&] { fit_logistic(ds); }) == ErrorCode::Separation);
  // the Jeffreys penalty keeps the estimate finite
  const FitResult firth = fit_firth(ds);
  CHECK(firth.converged);
  CHECK(std::isfinite(firth.beta[1]));
  CHECK(firth.beta[1] > 0.0);
}

TEST_CASE("quasi-complete separation is reported") {
  const Dataset ds = from_rows({{1, 0}, {1, 0}, {1, 1}, {1, 1}, {1, 2}, {1, 2}}, {0, 0, 0, 1, 1, 1});
  CHECK(code_of([&] { fit_logistic(ds); }) == ErrorCode::Separation);
}

TEST_CASE("rank deficiency is reported") {
  const Dataset ds = from_rows({{1, 1, 2}, {1, 2, 4}, {1, 3, 6}, {1, 4, 8}}, {0, 1, 0, 1});
  CHECK(code_of([&] { fit_logistic(ds); }) == ErrorCode::RankDeficient);
}

TEST_CASE("penalised fit matches its oracle objective") {
  const Dataset ds = random_logistic_dataset(9, 60, 3);
  const Vector penalty{0.0, 2.0, 0.5, 4.0};
  const FitResult fit = fit_logistic_penalized(ds, penalty);
  const auto oracle = fd_newton_maximize(
      [&](const std::vector<double>& b) {
        double pen = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) pen += 0.5 * penalty[j] * b[j] * b[j];
        return ref_loglik(ds, b) - pen;
      },
      std::vector<double>(4, 0.0));
  for (std::size_t j = 0; j < 4; ++j) CHECK(fit.beta[j] == doctest::Approx(oracle[j]).epsilon(1e-5));
}

TEST_CASE("Jeffreys fit: closed forms") {
  // intercept only: p = (k + 1/2) / (n + 1)
  for (auto [n, k] : {std::pair{10, 1}, {50, 3}, {100, 0}, {7, 7}}) {
    Dataset ds;
    ds.x = Matrix(static_cast<std::size_t>(n), 1, 1.0);
    ds.y.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < k; ++i) ds.y[static_cast<std::size_t>(i)] = 1.0;
    ds.w.assign(static_cast<std::size_t>(n), 1.0);
    const FitResult fit = fit_firth(ds);
    CHECK(sigmoid(fit.beta[0]) == doctest::Approx((k + 0.5) / (n + 1.0)).epsilon(1e-9));
  }
  // two points, saturated: fitted probabilities 1/4 and 3/4
  const Dataset two = from_rows({{1, 0}, {1, 1}}, {0, 1});
  const FitResult fit = fit_firth(two);
  CHECK(fit.beta[0] == doctest::Approx(-std::log(3.0)).epsilon(1e-9));
  CHECK(fit.beta[1] == doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-9));
}

TEST_CASE("Jeffreys fit matches the penalised-likelihood oracle") {
  for (std::uint64_t seed = 20; seed < 25; ++seed) {
    const Dataset ds = random_logistic_dataset(seed, 40, 2);
    const FitResult fit = fit_firth(ds);
    const auto oracle = fd_newton_maximize(
        [&](const std::vector<double>& b) { return ref_firth_objective(ds, b); }, std::vector<double>(3, 0.0));
    for (std::size_t j = 0; j < 3; ++j) CHECK(fit.beta[j] == doctest::Approx(oracle[j]).epsilon(1e-5));
    CHECK(firth_log_likelihood(ds, fit.beta) == doctest::Approx(ref_firth_objective(ds, fit.beta)).epsilon(1e-10));
  }
}

TEST_CASE("Jeffreys derivatives agree with finite differences") {
  const Dataset ds = random_logistic_dataset(77, 30, 2);
  const Vector beta{-0.3, 0.4, -0.2};
  const Vector g = firth_score(ds, beta);
  const Matrix H = firth_information(ds, beta);
  const double h = 1e-5;
  for (std::size_t a = 0; a < 3; ++a) {
    Vector bp = beta, bm = beta;
    bp[a] += h;
    bm[a] -= h;
    CHECK(g[a] == doctest::Approx((ref_firth_objective(ds, bp) - ref_firth_objective(ds, bm)) / (2 * h)).epsilon(1e-6));
    const Vector gp = firth_score(ds, bp), gm = firth_score(ds, bm);
    for (std::size_t b = 0; b < 3; ++b)
      CHECK(H(b, a) == doctest::Approx(-(gp[b] - gm[b]) / (2 * h)).epsilon(1e-5));
  }
  CHECK(is_symmetric(H));
}

TEST_CASE("objective helpers are consistent") {
  const Dataset ds = random_logistic_dataset(3, 50, 2);
  const Vector beta{0.1, -0.2, 0.3};
  CHECK(log_likelihood(ds, beta) == doctest::Approx(ref_loglik(ds, beta)).epsilon(1e-12));
  const Vector s = score(ds, beta);
  const double h = 1e-6;
  for (std::size_t a = 0; a < 3; ++a) {
    Vector bp = beta, bm = beta;
    bp[a] += h;
    bm[a] -= h;
    CHECK(s[a] == doctest::Approx((ref_loglik(ds, bp) - ref_loglik(ds, bm)) / (2 * h)).epsilon(1e-6));
  }
  const Matrix cov = covariance(fit_logistic(ds));
  const Matrix I = fisher_information(ds, fit_logistic(ds).beta);
  const Matrix prod = multiply(cov, I);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) CHECK(prod(a, b) == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-9));
}
