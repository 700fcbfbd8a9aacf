// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0
//
// Self-projection: refit a simple equation to the posterior means of a
// reference model by maximizing the soft-label Bernoulli log-likelihood,
// which is the same as minimizing the mean KL divergence over the case mix.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "credence/data.hpp"
#include "credence/glm.hpp"
#include "credence/priors.hpp"

namespace credence {

/// D_KL(Bernoulli(p) || Bernoulli(q)) in nats, with 0 log 0 = 0.
double kl_bernoulli(double p, double q);

struct ProjectedModel {
  std::vector<TermSpec> terms;
  Vector beta;
  Link link = Link::Logit;
  std::string source_fingerprint;
  double mean_residual_kl = 0.0;
  int iterations = 0;

  /// One inverse-link evaluation. Features are raw values in this model's
  /// term order.
  double predict(std::span<const double> features) const;
  /// Prediction from a design row (intercept first) in this model's term order.
  double predict_design(std::span<const double> design_row) const;
};

/// Stable hex fingerprint of a model's coefficients and covariance.
std::string model_fingerprint(const PackagedModel& model);

/// Projects onto the listed terms (empty = all model terms) with the given link.
/// Targets are quadrature posterior means at the model's recorded order.
ProjectedModel self_project(const PackagedModel& model, const Dataset& case_mix,
                            std::span<const std::string> terms = {}, Link link = Link::Logit,
                            const FitOptions& opts = {});

/// Soft-label maximum likelihood fit of true probabilities on the candidate
/// terms over the whole population.
Vector pseudo_true_fit(const Dataset& population, std::span<const std::string> candidate_terms = {},
                       const FitOptions& opts = {});

/// Soft-label fit with identity link: maximizes
/// sum w [y log(x b) + (1-y) log(1 - x b)]. Throws IdentityLinkOutOfRange
/// when the fitted values cannot be kept inside (0,1).
FitResult fit_identity_link(const Dataset& ds, const FitOptions& opts = {});

}  // namespace credence
