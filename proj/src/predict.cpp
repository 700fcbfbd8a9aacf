// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include "credence/predict.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

#include "credence/error.hpp"
#include "credence/gauss_hermite.hpp"
#include "credence/normal.hpp"
#include "credence/projection.hpp"

namespace credence {

Vector design_row(const PackagedModel& model, std::span<const double> features) {
  if (features.size() != model.terms.size()) {
    std::ostringstream msg;
    msg << "expected " << model.terms.size() << " features, got " << features.size();
    fail(ErrorCode::DimensionMismatch, msg.str());
  }
  Vector row(features.size() + 1);
  row[0] = 1.0;
  for (std::size_t j = 0; j < features.size(); ++j)
    row[j + 1] = prepare_feature(model.terms[j], features[j]);
  return row;
}

LinearPredictorDist linear_predictor_dist(std::span<const double> beta, const Matrix& sigma,
                                          std::span<const double> design_row) {
  if (design_row.size() != beta.size() || sigma.rows() != beta.size())
    fail(ErrorCode::DimensionMismatch, "design row does not match model dimension");
  LinearPredictorDist d;
  d.mu = dot(beta, design_row);
  const Vector sx = multiply(sigma, design_row);
  d.sigma = std::sqrt(std::max(0.0, dot(design_row, sx)));
  return d;
}

LinearPredictorDist linear_predictor_dist(const PackagedModel& model,
                                          std::span<const double> features) {
  const Vector row = design_row(model, features);
  return linear_predictor_dist(model.beta, model.sigma, row);
}

std::vector<LinearPredictorDist> linear_predictor_dists(std::span<const double> beta,
                                                        const Matrix& sigma,
                                                        const Matrix& design) {
  if (design.cols() != beta.size())
    fail(ErrorCode::DimensionMismatch, "design columns do not match model dimension");
  const Vector mu = multiply(design, beta);
  const Vector var = row_quadratic_forms(design, sigma);
  std::vector<LinearPredictorDist> out(design.rows());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = {mu[i], std::sqrt(std::max(0.0, var[i]))};
  return out;
}

double plug_in(const LinearPredictorDist& d) { return sigmoid(d.mu); }

double posterior_mean_quadrature(const LinearPredictorDist& d, int order) {
  if (d.sigma == 0.0) return sigmoid(d.mu);
  if (!(d.sigma > 0.0) || !std::isfinite(d.mu) || !std::isfinite(d.sigma))
    fail(ErrorCode::InvalidArgument, "linear predictor distribution must be finite with sigma >= 0");
  const GaussHermiteRule& rule = cached_gauss_hermite_rule(order);
  const double scale = std::numbers::sqrt2 * d.sigma;
  double sum = 0.0;
  for (int k = 0; k < rule.order; ++k) sum += rule.weights[k] * sigmoid(d.mu + scale * rule.nodes[k]);
  return sum / std::sqrt(std::numbers::pi);
}

double posterior_mean_mackay(const LinearPredictorDist& d) {
  return sigmoid(d.mu / std::sqrt(1.0 + std::numbers::pi * d.sigma * d.sigma / 8.0));
}

std::pair<double, double> credible_interval(const LinearPredictorDist& d, double level) {
  if (!(level > 0.0 && level < 1.0))
    fail(ErrorCode::InvalidArgument, "credible level must be in (0,1)");
  const double z = std_normal_quantile(0.5 * (1.0 + level));
  return {sigmoid(d.mu - z * d.sigma), sigmoid(d.mu + z * d.sigma)};
}

double posterior_density(const LinearPredictorDist& d, double p) {
  if (!(d.sigma > 0.0))
    fail(ErrorCode::DegenerateDistribution, "posterior is a point mass (sigma = 0)");
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::DomainError, "density requires 0 < p < 1");
  const double z = (logit(p) - d.mu) / d.sigma;
  return std_normal_pdf(z) / (d.sigma * p * (1.0 - p));
}

const char* to_string(Method m) {
  switch (m) {
    case Method::Quadrature: return "quadrature";
    case Method::MacKay: return "mackay";
    case Method::Projected: return "projected";
  }
  return "quadrature";
}

Method parse_method(std::string_view text) {
  if (text == "quadrature") return Method::Quadrature;
  if (text == "mackay") return Method::MacKay;
  if (text == "projected") return Method::Projected;
  fail(ErrorCode::InvalidArgument, "unknown method '" + std::string(text) +
                                       "' (expected quadrature, mackay or projected)");
}

std::string PredictionSummary::method_tag() const {
  if (method == Method::Quadrature) return "quadrature(" + std::to_string(quadrature_k) + ")";
  return to_string(method);
}

namespace {

PredictionSummary summarize(const PackagedModel& model, std::span<const double> features,
                            const Vector& row, const PredictOptions& opts) {
  PredictionSummary s;
  s.method = opts.method;
  s.level = opts.level;
  s.quadrature_k = model.quadrature_k;
  s.dist = linear_predictor_dist(model.beta, model.sigma, row);
  s.plug_in = plug_in(s.dist);
  std::tie(s.cri_lo, s.cri_hi) = credible_interval(s.dist, opts.level);
  switch (opts.method) {
    case Method::Quadrature:
      s.post_mean = posterior_mean_quadrature(s.dist, model.quadrature_k);
      break;
    case Method::MacKay:
      s.post_mean = posterior_mean_mackay(s.dist);
      break;
    case Method::Projected: {
      const ProjectedModel* proj = opts.projected;
      Vector sub(proj->terms.size());
      for (std::size_t j = 0; j < sub.size(); ++j) {
        const auto idx = find_term(model.terms, proj->terms[j].name);
        if (!idx)
          fail(ErrorCode::DimensionMismatch,
               "projected term '" + proj->terms[j].name + "' is not a model term");
        sub[j] = features[*idx];
      }
      s.post_mean = proj->predict(sub);
      break;
    }
  }
  return s;
}

void check_options(const PredictOptions& opts) {
  if (opts.method == Method::Projected && opts.projected == nullptr)
    fail(ErrorCode::InvalidArgument, "method 'projected' requires a projected model");
  if (!(opts.level > 0.0 && opts.level < 1.0))
    fail(ErrorCode::InvalidArgument, "credible level must be in (0,1)");
}

}  // namespace

PredictionSummary predict(const PackagedModel& model, std::span<const double> features,
                          const PredictOptions& opts) {
  check_options(opts);
  return summarize(model, features, design_row(model, features), opts);
}

std::vector<PredictionSummary> predict_batch(const PackagedModel& model, const Matrix& features,
                                             const PredictOptions& opts) {
  check_options(opts);
  std::vector<PredictionSummary> out;
  out.reserve(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const auto f = features.row(i);
    out.push_back(summarize(model, f, design_row(model, f), opts));
  }
  return out;
}

Vector features_by_name(const PackagedModel& model,
                        std::span<const std::pair<std::string, double>> values) {
  Vector out(model.terms.size());
  for (std::size_t j = 0; j < model.terms.size(); ++j) {
    bool found = false;
    for (const auto& [name, v] : values)
      if (name == model.terms[j].name) {
        out[j] = v;
        found = true;
      }
    if (!found) fail(ErrorCode::MissingColumn, "missing feature '" + model.terms[j].name + "'");
  }
  return out;
}

}  // namespace credence
