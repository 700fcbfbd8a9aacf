// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0
//
// Deployment-time predictions from a PackagedModel. Under the normal
// approximation of the coefficients, the linear predictor of one individual
// is N(mu, sigma^2); every summary below is a functional of that law.

#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "credence/priors.hpp"

namespace credence {

struct ProjectedModel;

struct LinearPredictorDist {
  double mu = 0.0;
  double sigma = 0.0;
};

/// x_tilde = (1, prepared features); features are raw values in term order.
Vector design_row(const PackagedModel& model, std::span<const double> features);

LinearPredictorDist linear_predictor_dist(const PackagedModel& model,
                                          std::span<const double> features);
/// From an already-built design row (intercept first).
LinearPredictorDist linear_predictor_dist(std::span<const double> beta, const Matrix& sigma,
                                          std::span<const double> design_row);
/// Row-wise distributions for a design matrix with intercept column.
std::vector<LinearPredictorDist> linear_predictor_dists(std::span<const double> beta,
                                                        const Matrix& sigma,
                                                        const Matrix& design);

double plug_in(const LinearPredictorDist& d);

/// E[logit^-1(eta)] ~ (1/sqrt(pi)) sum_k w_k logit^-1(mu + sqrt(2) sigma x_k).
double posterior_mean_quadrature(const LinearPredictorDist& d, int order = 30);

/// logit^-1(mu / sqrt(1 + pi sigma^2 / 8))
double posterior_mean_mackay(const LinearPredictorDist& d);

/// Equal-tailed interval on the probability scale.
std::pair<double, double> credible_interval(const LinearPredictorDist& d, double level = 0.95);

/// Logit-normal density at p. Throws DegenerateDistribution when sigma = 0.
double posterior_density(const LinearPredictorDist& d, double p);

enum class Method { Quadrature, MacKay, Projected };

const char* to_string(Method m);
Method parse_method(std::string_view text);

struct PredictionSummary {
  double plug_in = 0.0;
  double post_mean = 0.0;
  double cri_lo = 0.0;
  double cri_hi = 0.0;
  double level = 0.95;
  Method method = Method::Quadrature;
  int quadrature_k = 30;
  LinearPredictorDist dist;

  /// "quadrature(30)", "mackay" or "projected"
  std::string method_tag() const;
};

struct PredictOptions {
  Method method = Method::Quadrature;
  double level = 0.95;
  const ProjectedModel* projected = nullptr;
};

PredictionSummary predict(const PackagedModel& model, std::span<const double> features,
                          const PredictOptions& opts = {});

/// One summary per row of raw features (n x terms), order preserved.
std::vector<PredictionSummary> predict_batch(const PackagedModel& model, const Matrix& features,
                                             const PredictOptions& opts = {});

/// Feature vector in model term order from name/value pairs; throws
/// MissingColumn for absent terms.
Vector features_by_name(const PackagedModel& model,
                        std::span<const std::pair<std::string, double>> values);

}  // namespace credence
