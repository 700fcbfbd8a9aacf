// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include "credence/priors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "credence/error.hpp"

namespace credence {

const char* to_string(PriorVariant v) {
  switch (v) {
    case PriorVariant::Flat: return "flat";
    case PriorVariant::Jeffreys: return "jeffreys";
    case PriorVariant::LogF: return "logf";
    case PriorVariant::GaussianRidge: return "ridge";
    case PriorVariant::Projected: return "projected";
  }
  return "flat";
}

PriorVariant parse_prior_variant(std::string_view text) {
  if (text == "flat") return PriorVariant::Flat;
  if (text == "jeffreys") return PriorVariant::Jeffreys;
  if (text == "logf") return PriorVariant::LogF;
  if (text == "ridge") return PriorVariant::GaussianRidge;
  if (text == "projected") return PriorVariant::Projected;
  fail(ErrorCode::InvalidArgument, "unknown prior '" + std::string(text) +
                                       "' (expected flat, jeffreys, logf or ridge)");
}

const char* to_string(Link link) { return link == Link::Logit ? "logit" : "identity"; }

Link parse_link(std::string_view text) {
  if (text == "logit") return Link::Logit;
  if (text == "identity") return Link::Identity;
  fail(ErrorCode::InvalidArgument, "unknown link '" + std::string(text) + "'");
}

void PackagedModel::validate() const {
  if (beta.size() != terms.size() + 1)
    fail(ErrorCode::DimensionMismatch, "model has " + std::to_string(beta.size()) +
                                           " coefficients for " + std::to_string(terms.size()) +
                                           " terms");
  if (sigma.rows() != beta.size() || sigma.cols() != beta.size())
    fail(ErrorCode::DimensionMismatch, "covariance shape does not match coefficients");
  for (double b : beta)
    if (!std::isfinite(b)) fail(ErrorCode::RangeError, "non-finite coefficient");
  validate_terms(terms);
  if (!is_positive_semidefinite(sigma))
    fail(ErrorCode::NotPositiveDefinite, "model covariance is not positive semi-definite");
  if (quadrature_k < 1 || quadrature_k > 100)
    fail(ErrorCode::InvalidArgument, "quadrature order out of range");
}

namespace {

FitDiagnostics diagnostics_from(const FitResult& fit, std::size_t rows, const FitOptions& opts) {
  FitDiagnostics d;
  d.converged = fit.converged;
  d.iterations = fit.iterations;
  d.deviance = fit.deviance;
  d.max_score = fit.max_score;
  d.rows = rows;
  d.tolerance = opts.tolerance;
  d.max_iterations = opts.max_iterations;
  return d;
}

PriorInfo prior_info(PriorVariant variant) {
  PriorInfo info;
  info.variant = variant;
  return info;
}

// Exact symmetry, so the lower triangle alone describes the covariance.
Matrix symmetrized(Matrix sigma) {
  for (std::size_t i = 0; i < sigma.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j) sigma(j, i) = sigma(i, j) = 0.5 * (sigma(i, j) + sigma(j, i));
  return sigma;
}

PackagedModel package(const Dataset& ds, const FitResult& fit, Matrix sigma, PriorInfo prior,
                      const FitOptions& opts) {
  PackagedModel model;
  model.terms = ds.terms;
  model.beta = fit.beta;
  model.sigma = symmetrized(std::move(sigma));
  model.prior = std::move(prior);
  model.diagnostics = diagnostics_from(fit, ds.rows(), opts);
  Cholesky check(model.sigma);
  return model;
}

}  // namespace

PackagedModel fit_flat(const Dataset& ds, const FitOptions& opts) {
  const FitResult fit = fit_logistic(ds, opts);
  return package(ds, fit, covariance(fit), prior_info(PriorVariant::Flat), opts);
}

PackagedModel fit_jeffreys(const Dataset& ds, const FitOptions& opts) {
  const FitResult fit = fit_firth(ds, opts);
  PackagedModel model = package(ds, fit, covariance(fit), prior_info(PriorVariant::Jeffreys), opts);
  return model;
}

double logf_log_prior(double beta, double m) {
  // m beta / 2 - m log(1 + e^beta)
  return 0.5 * m * beta + m * log_sigmoid(-beta);
}

Dataset augment_logf(const Dataset& ds, double m, std::span<const std::size_t> columns) {
  if (!(m > 0.0) || !std::isfinite(m))
    fail(ErrorCode::InvalidArgument, "log-F parameter m must be positive");
  const std::size_t n = ds.rows();
  const std::size_t k = ds.x.cols();
  Dataset out;
  out.terms = ds.terms;
  out.x = Matrix(n + 2 * columns.size(), k);
  out.y = ds.y;
  out.w = ds.w;
  std::copy(ds.x.data(), ds.x.data() + n * k, out.x.data());
  std::size_t row = n;
  for (std::size_t c : columns) {
    if (c >= k) fail(ErrorCode::DimensionMismatch, "log-F column out of range");
    for (double label : {0.0, 1.0}) {
      out.x(row, c) = 1.0;
      out.y.push_back(label);
      out.w.push_back(0.5 * m);
      ++row;
    }
  }
  return out;
}

PackagedModel fit_logf(const Dataset& ds, const LogFOptions& logf, const FitOptions& opts) {
  std::vector<std::size_t> columns;
  PriorInfo prior = prior_info(PriorVariant::LogF);
  prior.m = logf.m;
  if (logf.penalise_intercept) {
    columns.push_back(0);
    prior.penalised_terms.push_back("(Intercept)");
  }
  for (const auto& name : logf.skip)
    if (!find_term(ds.terms, name))
      fail(ErrorCode::MissingColumn, "log-F skip term '" + name + "' is not a model term");
  for (std::size_t j = 0; j < ds.terms.size(); ++j) {
    if (std::find(logf.skip.begin(), logf.skip.end(), ds.terms[j].name) != logf.skip.end())
      continue;
    columns.push_back(j + 1);
    prior.penalised_terms.push_back(ds.terms[j].name);
  }
  const Dataset augmented = augment_logf(ds, logf.m, columns);
  const FitResult fit = fit_logistic(augmented, opts);
  PackagedModel model = package(ds, fit, covariance(fit), std::move(prior), opts);
  // in-sample diagnostics exclude the pseudo-rows
  model.diagnostics.deviance = -2.0 * log_likelihood(ds, fit.beta);
  model.diagnostics.augmentation_rows = 2 * columns.size();
  return model;
}

RidgeState ridge_at(const Dataset& std_ds, double lambda, std::span<const double> start,
                    const FitOptions& opts) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    fail(ErrorCode::InvalidArgument, "ridge precision must be positive and finite");
  const std::size_t k = std_ds.x.cols();
  Vector penalty(k, lambda);
  penalty[0] = 0.0;
  RidgeState state;
  state.lambda = lambda;
  state.fit = fit_logistic_penalized(std_ds, penalty, opts, start);
  const Cholesky chol(state.fit.information);
  state.h_inverse = chol.inverse();
  double slopes_sq = 0.0;
  for (std::size_t j = 1; j < k; ++j) slopes_sq += state.fit.beta[j] * state.fit.beta[j];
  const double p = static_cast<double>(k - 1);
  state.log_marginal = log_likelihood(std_ds, state.fit.beta) - 0.5 * lambda * slopes_sq +
                       0.5 * p * std::log(lambda) - 0.5 * chol.log_det();
  return state;
}

double ridge_log_marginal(const Dataset& std_ds, double log_lambda, const FitOptions& opts) {
  return ridge_at(std_ds, std::exp(log_lambda), {}, opts).log_marginal;
}

namespace {

class MarginalObjective {
 public:
  MarginalObjective(const Dataset& std_ds, const FitOptions& opts) : ds_(std_ds), opts_(opts) {}

  double operator()(double rho) {
    RidgeState s = ridge_at(ds_, std::exp(rho), warm_, opts_);
    warm_ = s.fit.beta;
    return s.log_marginal;
  }

 private:
  const Dataset& ds_;
  const FitOptions& opts_;
  Vector warm_;
};

struct Maximizer {
  double rho = 0.0;
  double curvature = 0.0;  // L''(rho)
};

Maximizer maximize_marginal(const Dataset& std_ds, const RidgeOptions& ridge,
                            const FitOptions& opts) {
  if (!(ridge.log_lambda_lo < ridge.log_lambda_hi))
    fail(ErrorCode::InvalidArgument, "empty log-lambda search interval");
  MarginalObjective L(std_ds, opts);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = ridge.log_lambda_lo, b = ridge.log_lambda_hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = L(c), fd = L(d);
  while (b - a > ridge.golden_tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = L(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = L(d);
    }
  }
  double rho = 0.5 * (a + b);
  const double h = ridge.curvature_step;
  auto derivatives = [&](double r, double& f0, double& d1, double& d2) {
    const double fp = L(r + h), fm = L(r - h);
    f0 = L(r);
    d1 = (fp - fm) / (2.0 * h);
    d2 = (fp - 2.0 * f0 + fm) / (h * h);
  };
  double f0, d1, d2;
  derivatives(rho, f0, d1, d2);
  // single Newton polish, kept only if it stays in range and does not lose
  if (d2 < 0.0) {
    const double cand = std::clamp(rho - d1 / d2, ridge.log_lambda_lo, ridge.log_lambda_hi);
    if (L(cand) >= f0) {
      rho = cand;
      derivatives(rho, f0, d1, d2);
    }
  }
  return {rho, d2};
}

}  // namespace

RidgeCovariances ridge_covariances(const Dataset& std_ds, const RidgeOptions& ridge,
                                   const FitOptions& opts) {
  const Maximizer best = maximize_marginal(std_ds, ridge, opts);
  const double lambda = std::exp(best.rho);
  RidgeCovariances out;
  out.state = ridge_at(std_ds, lambda, {}, opts);
  const std::size_t k = std_ds.x.cols();

  out.log_lambda_hat = best.rho;
  out.flat_marginal = !(best.curvature < 0.0);
  out.var_log_lambda =
      out.flat_marginal ? ridge.fallback_var_log_lambda : -1.0 / best.curvature;
  out.uncorrected = out.state.h_inverse;

  // d beta / d log lambda = -lambda H^{-1} P beta
  Vector pb(k, 0.0);
  for (std::size_t j = 1; j < k; ++j) pb[j] = out.state.fit.beta[j];
  Vector g = multiply(out.uncorrected, pb);
  for (double& v : g) v *= -lambda;
  out.corrected = out.uncorrected;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) out.corrected(i, j) += g[i] * g[j] * out.var_log_lambda;
  return out;
}

PackagedModel fit_bayes_ridge(const Dataset& ds, const RidgeOptions& ridge, const FitOptions& opts) {
  if (ds.terms.size() < 2)
    fail(ErrorCode::InvalidArgument, "Bayesian ridge needs at least two predictor terms");
  auto [std_ds, standardization] = standardize(ds);
  const RidgeCovariances cov = ridge_covariances(std_ds, ridge, opts);

  PriorInfo prior = prior_info(PriorVariant::GaussianRidge);
  prior.lambda_hat = cov.state.lambda;
  prior.var_log_lambda = cov.var_log_lambda;
  prior.flat_marginal = cov.flat_marginal;

  PackagedModel model;
  model.terms = ds.terms;
  model.beta = standardization.to_natural(cov.state.fit.beta);
  model.sigma = symmetrized(standardization.covariance_to_natural(cov.corrected));
  model.prior = std::move(prior);
  model.diagnostics = diagnostics_from(cov.state.fit, ds.rows(), opts);
  model.diagnostics.deviance = -2.0 * log_likelihood(ds, model.beta);
  model.standardization = std::move(standardization);
  Cholesky check(model.sigma);
  return model;
}

PackagedModel fit_ridge_fixed(const Dataset& ds, double lambda, const FitOptions& opts) {
  auto [std_ds, standardization] = standardize(ds);
  const RidgeState state = ridge_at(std_ds, lambda, {}, opts);
  PriorInfo prior = prior_info(PriorVariant::GaussianRidge);
  prior.lambda_hat = lambda;
  prior.var_log_lambda = 0.0;
  PackagedModel model;
  model.terms = ds.terms;
  model.beta = standardization.to_natural(state.fit.beta);
  model.sigma = symmetrized(standardization.covariance_to_natural(state.h_inverse));
  model.prior = std::move(prior);
  model.diagnostics = diagnostics_from(state.fit, ds.rows(), opts);
  model.standardization = std::move(standardization);
  return model;
}

PackagedModel fit_model(const Dataset& ds, const PriorSpec& prior, const FitOptions& opts) {
  switch (prior.variant) {
    case PriorVariant::Flat: return fit_flat(ds, opts);
    case PriorVariant::Jeffreys: return fit_jeffreys(ds, opts);
    case PriorVariant::LogF: return fit_logf(ds, prior.logf, opts);
    case PriorVariant::GaussianRidge: return fit_bayes_ridge(ds, prior.ridge, opts);
    case PriorVariant::Projected: break;
  }
  fail(ErrorCode::InvalidArgument, "projected models are produced by self-projection, not fitting");
}

}  // namespace credence
