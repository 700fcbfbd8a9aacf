// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0
//
// Prior strategies. Every fitter returns a PackagedModel: point estimates and
// a covariance matrix describing a multivariate-normal (Laplace) posterior
// approximation on the natural scale of the predictors.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "credence/data.hpp"
#include "credence/glm.hpp"
#include "credence/linalg.hpp"

namespace credence {

enum class PriorVariant { Flat, Jeffreys, LogF, GaussianRidge, Projected };

const char* to_string(PriorVariant v);
PriorVariant parse_prior_variant(std::string_view text);

enum class Link { Logit, Identity };

const char* to_string(Link link);
Link parse_link(std::string_view text);

struct LogFOptions {
  double m = 2.0;
  /// Terms (by name) left without a log-F prior.
  std::vector<std::string> skip;
  bool penalise_intercept = false;
};

struct RidgeOptions {
  double log_lambda_lo = -8.0;
  double log_lambda_hi = 8.0;
  double golden_tolerance = 1e-4;
  double curvature_step = 1e-3;
  /// Var(log lambda) used when the marginal likelihood has no negative
  /// curvature at its maximizer.
  double fallback_var_log_lambda = 1.0;
};

struct PriorSpec {
  PriorVariant variant = PriorVariant::Flat;
  LogFOptions logf;
  RidgeOptions ridge;
};

struct PriorInfo {
  PriorVariant variant = PriorVariant::Flat;
  std::optional<double> m;
  std::vector<std::string> penalised_terms;  // log-F only
  std::optional<double> lambda_hat;
  std::optional<double> var_log_lambda;
  bool flat_marginal = false;
};

struct FitDiagnostics {
  bool converged = false;
  int iterations = 0;
  double deviance = 0.0;
  double max_score = 0.0;
  std::size_t rows = 0;
  std::size_t augmentation_rows = 0;
  double tolerance = FitOptions{}.tolerance;
  int max_iterations = FitOptions{}.max_iterations;
};

struct PackagedModel {
  std::string schema_version = "1";
  std::vector<TermSpec> terms;
  Vector beta;
  Matrix sigma;
  Link link = Link::Logit;
  PriorInfo prior;
  int quadrature_k = 30;
  FitDiagnostics diagnostics;
  std::optional<Standardization> standardization;

  std::size_t dim() const noexcept { return beta.size(); }
  /// Shape and covariance checks; sigma must be PSD (fitters emit PD).
  void validate() const;
};

PackagedModel fit_flat(const Dataset& ds, const FitOptions& opts = {});
PackagedModel fit_jeffreys(const Dataset& ds, const FitOptions& opts = {});
PackagedModel fit_logf(const Dataset& ds, const LogFOptions& logf, const FitOptions& opts = {});
PackagedModel fit_bayes_ridge(const Dataset& ds, const RidgeOptions& ridge = {},
                              const FitOptions& opts = {});
PackagedModel fit_model(const Dataset& ds, const PriorSpec& prior, const FitOptions& opts = {});

/// Appends two weight-m/2 pseudo-rows (y = 0 and y = 1) per penalised column:
/// a one in that column, zeros everywhere else including the intercept.
Dataset augment_logf(const Dataset& ds, double m, std::span<const std::size_t> columns);

/// Log-F(m, m) log prior density (up to a constant) on one coefficient.
double logf_log_prior(double beta, double m);

// Bayesian ridge internals, on an already-standardized dataset.
struct RidgeState {
  FitResult fit;         // penalised mode at lambda
  Matrix h_inverse;      // inverse of the penalised information H_lambda
  double lambda = 0.0;
  double log_marginal = 0.0;
};

/// Penalised fit with slope precision lambda (intercept unpenalised) and the
/// Laplace-approximate log marginal likelihood
///   loglik(b) - lambda/2 |b_slopes|^2 + (p/2) log lambda - 1/2 log det H.
RidgeState ridge_at(const Dataset& std_ds, double lambda, std::span<const double> start = {},
                    const FitOptions& opts = {});
double ridge_log_marginal(const Dataset& std_ds, double log_lambda, const FitOptions& opts = {});

/// Ridge posterior with lambda fixed (no hyperparameter uncertainty), on the
/// natural scale. Used for limit probes.
PackagedModel fit_ridge_fixed(const Dataset& ds, double lambda, const FitOptions& opts = {});

/// Posterior covariance of the ridge fit on the standardized scale without and
/// with the log-lambda correction, at the selected lambda.
struct RidgeCovariances {
  RidgeState state;  // mode at the selected lambda
  bool flat_marginal = false;
  Matrix uncorrected;
  Matrix corrected;
  double log_lambda_hat = 0.0;
  double var_log_lambda = 0.0;
};
RidgeCovariances ridge_covariances(const Dataset& std_ds, const RidgeOptions& ridge = {},
                                   const FitOptions& opts = {});

}  // namespace credence
