// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "support.hpp"

#include "credence/error.hpp"
#include "credence/priors.hpp"

using namespace credence;
using namespace credence::testing;

TEST_CASE("log-F augmentation equals direct penalised optimization") {
  std::uint64_t seed = 100;
  for (double m : {1.0, 2.0, 5.0}) {
    for (int rep = 0; rep < 4; ++rep) {
      const Dataset ds = random_logistic_dataset(++seed, 80, 3);
      const PackagedModel fit = fit_logf(ds, LogFOptions{m, {}, false});
      const auto oracle = oracle_logf_fit(ds, m, {false, true, true, true});
      for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(fit.beta[j] - oracle[j]) <= 1e-6);
      CHECK(fit.diagnostics.augmentation_rows == 6);
      CHECK(fit.prior.m == m);
    }
  }
}

TEST_CASE("log-F options: skipped terms and penalised intercept") {
  const Dataset ds = random_logistic_dataset(7, 60, 2);
  const PackagedModel skip = fit_logf(ds, LogFOptions{2.0, {"x2"}, false});
  const auto o1 = oracle_logf_fit(ds, 2.0, {false, true, false});
  for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(skip.beta[j] - o1[j]) <= 1e-6);
  CHECK(skip.diagnostics.augmentation_rows == 2);
  CHECK(skip.prior.penalised_terms == std::vector<std::string>{"x1"});

  const PackagedModel all = fit_logf(ds, LogFOptions{2.0, {}, true});
  const auto o2 = oracle_logf_fit(ds, 2.0, {true, true, true});
  for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(all.beta[j] - o2[j]) <= 1e-6);
  CHECK_THROWS_AS(fit_logf(ds, LogFOptions{2.0, {"nope"}, false}), Error);
  CHECK_THROWS_AS(fit_logf(ds, LogFOptions{0.0, {}, false}), Error);
}

TEST_CASE("log-F pseudo-row layout") {
  const Dataset ds = random_logistic_dataset(1, 5, 2);
  const std::vector<std::size_t> cols{1, 2};
  const Dataset aug = augment_logf(ds, 3.0, cols);
  REQUIRE(aug.rows() == 9);
  for (std::size_t r = 5; r < 9; ++r) {
    CHECK(aug.w[r] == 1.5);
    CHECK(aug.x(r, 0) == 0.0);
    CHECK(aug.x(r, cols[(r - 5) / 2]) == 1.0);
  }
  CHECK(aug.y[5] == 0.0);
  CHECK(aug.y[6] == 1.0);
  // the pseudo-rows contribute exactly the log-F log density
  const double b = 0.7;
  const double pseudo = 1.5 * (std::log(1.0 - ref_sigmoid(b)) + std::log(ref_sigmoid(b)));
  CHECK(logf_log_prior(b, 3.0) == doctest::Approx(pseudo).epsilon(1e-12));
}

TEST_CASE("flat and Jeffreys models package a positive-definite covariance") {
  const Dataset ds = random_logistic_dataset(5, 150, 3);
  for (const PackagedModel& m : {fit_flat(ds), fit_jeffreys(ds)}) {
    CHECK(m.dim() == 4);
    CHECK(m.diagnostics.converged);
    CHECK(m.diagnostics.rows == 150);
    CHECK_NOTHROW(Cholesky{m.sigma});
    CHECK(is_symmetric(m.sigma));
    CHECK_NOTHROW(m.validate());
  }
  const PackagedModel f = fit_flat(ds);
  const PackagedModel j = fit_jeffreys(ds);
  // the Jeffreys penalty shrinks slopes toward zero on average
  double nf = 0.0, nj = 0.0;
  for (std::size_t k = 1; k < 4; ++k) {
    nf += f.beta[k] * f.beta[k];
    nj += j.beta[k] * j.beta[k];
  }
  CHECK(nj < nf);
}

TEST_CASE("ridge marginal likelihood matches an independent Laplace computation") {
  const Dataset ds = random_logistic_dataset(33, 100, 3);
  const auto [std_ds, s] = standardize(ds);
  for (double log_lambda : {-3.0, -1.0, 0.0, 1.5, 3.0}) {
    CHECK(ridge_log_marginal(std_ds, log_lambda) ==
          doctest::Approx(oracle_ridge_log_marginal(ds, std::exp(log_lambda))).epsilon(1e-9));
  }
}

TEST_CASE("ridge tuning agrees with a fine grid search") {
  for (std::uint64_t seed = 200; seed < 205; ++seed) {
    const Dataset ds = random_logistic_dataset(seed, 100, 4, -0.5, 0.3);
    const auto [std_ds, s] = standardize(ds);
    double best = -8.0, best_val = -INFINITY;
    for (int g = 0; g <= 1600; ++g) {
      const double r = -8.0 + 0.01 * g;
      const double v = ridge_log_marginal(std_ds, r);
      if (v > best_val) {
        best_val = v;
        best = r;
      }
    }
    const PackagedModel m = fit_bayes_ridge(ds);
    REQUIRE(m.prior.lambda_hat);
    CHECK(std::abs(*m.prior.lambda_hat / std::exp(best) - 1.0) <= 0.05);
    CHECK(*m.prior.var_log_lambda > 0.0);
  }
}

TEST_CASE("hyperparameter correction only adds uncertainty") {
  for (std::uint64_t seed = 300; seed < 305; ++seed) {
    const Dataset ds = random_logistic_dataset(seed, 90, 3);
    const auto [std_ds, s] = standardize(ds);
    const RidgeCovariances c = ridge_covariances(std_ds);
    CHECK(is_positive_semidefinite(subtract(c.corrected, c.uncorrected)));
    CHECK(is_symmetric(c.corrected));
  }
}

TEST_CASE("fixed-lambda ridge limits") {
  const Dataset ds = random_logistic_dataset(8, 200, 3);
  const PackagedModel flat = fit_flat(ds);
  const PackagedModel weak = fit_ridge_fixed(ds, 1e-9);
  for (std::size_t j = 0; j < 4; ++j) CHECK(weak.beta[j] == doctest::Approx(flat.beta[j]).epsilon(1e-6));
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      CHECK(weak.sigma(a, b) == doctest::Approx(flat.sigma(a, b)).epsilon(1e-5));
  const PackagedModel strong = fit_ridge_fixed(ds, 1e9);
  for (std::size_t j = 1; j < 4; ++j) CHECK(std::abs(strong.beta[j]) < 1e-6);
}

TEST_CASE("prior dispatch and names") {
  const Dataset ds = random_logistic_dataset(4, 100, 2);
  PriorSpec spec;
  for (auto v : {PriorVariant::Flat, PriorVariant::Jeffreys, PriorVariant::LogF, PriorVariant::GaussianRidge}) {
    spec.variant = v;
    CHECK(fit_model(ds, spec).prior.variant == v);
    CHECK(parse_prior_variant(to_string(v)) == v);
  }
  spec.variant = PriorVariant::Projected;
  CHECK_THROWS_AS(fit_model(ds, spec), Error);
  CHECK_THROWS_AS(parse_prior_variant("lasso"), Error);
  CHECK(parse_link("identity") == Link::Identity);
}
