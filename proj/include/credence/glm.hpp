// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0
//
// Weighted logistic regression by iteratively reweighted least squares.
// Responses may be soft labels in [0,1]; weights must be positive. The design
// matrix is used as given (no intercept is added), so augmented datasets with
// pseudo-rows can be passed directly.

#pragma once

#include <span>

#include "credence/data.hpp"
#include "credence/linalg.hpp"

namespace credence {

struct FitOptions {
  double tolerance = 1e-8;      // on max |score|
  int max_iterations = 100;
  int max_step_halvings = 20;
};

struct FitResult {
  Vector beta;
  Matrix information;  // negative Hessian of the (penalised) log-likelihood at beta
  double deviance = 0.0;
  bool converged = false;
  int iterations = 0;
  double max_score = 0.0;
};

double sigmoid(double eta);
double logit(double p);
/// log(sigmoid(eta)) without overflow.
double log_sigmoid(double eta);

/// Maximum likelihood fit. Throws Separation, NonConvergence or RankDeficient.
FitResult fit_logistic(const Dataset& ds, const FitOptions& opts = {});

/// Maximizes loglik - 0.5 * sum_j penalty[j] * beta_j^2 (a Gaussian prior
/// with precision penalty[j] on coefficient j; zero leaves it unpenalised).
FitResult fit_logistic_penalized(const Dataset& ds, std::span<const double> penalty,
                                 const FitOptions& opts = {},
                                 std::span<const double> start = {});

/// Firth / Jeffreys-prior fit: maximizes loglik + 0.5 log det I(beta).
/// The returned information is the negative Hessian of the penalised
/// objective (Fisher information if that Hessian is not positive definite).
FitResult fit_firth(const Dataset& ds, const FitOptions& opts = {});

/// Inverse of the information matrix.
Matrix covariance(const FitResult& fit);

// Objective pieces, exposed for diagnostics and derivative checks.
double log_likelihood(const Dataset& ds, std::span<const double> beta);
Vector score(const Dataset& ds, std::span<const double> beta);
Matrix fisher_information(const Dataset& ds, std::span<const double> beta);
double firth_log_likelihood(const Dataset& ds, std::span<const double> beta);
Vector firth_score(const Dataset& ds, std::span<const double> beta);
/// Negative Hessian of loglik + 0.5 log det I(beta).
Matrix firth_information(const Dataset& ds, std::span<const double> beta);

}  // namespace credence
