// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include "credence/projection.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <sstream>

#include "credence/error.hpp"
#include "credence/predict.hpp"

namespace credence {

double kl_bernoulli(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0))
    fail(ErrorCode::DomainError, "KL divergence needs probabilities in [0,1]");
  if (p == q) return 0.0;
  if (q == 0.0 || q == 1.0)
    fail(ErrorCode::DomainError, "KL divergence is infinite: q is 0 or 1 while p differs");
  double kl = 0.0;
  if (p > 0.0) kl += p * std::log(p / q);
  if (p < 1.0) kl += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return std::max(kl, 0.0);
}

double ProjectedModel::predict_design(std::span<const double> design_row) const {
  if (design_row.size() != beta.size())
    fail(ErrorCode::DimensionMismatch, "design row does not match projected model");
  const double eta = dot(beta, design_row);
  return link == Link::Logit ? sigmoid(eta) : eta;
}

double ProjectedModel::predict(std::span<const double> features) const {
  if (features.size() != terms.size())
    fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(terms.size()) +
                                           " features for projected model");
  Vector row(features.size() + 1);
  row[0] = 1.0;
  for (std::size_t j = 0; j < features.size(); ++j)
    row[j + 1] = prepare_feature(terms[j], features[j]);
  return predict_design(row);
}

std::string model_fingerprint(const PackagedModel& model) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& t : model.terms) mix(t.name.data(), t.name.size());
  mix(model.beta.data(), model.beta.size() * sizeof(double));
  mix(model.sigma.data(), model.sigma.rows() * model.sigma.cols() * sizeof(double));
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

FitResult fit_identity_link(const Dataset& ds, const FitOptions& opts) {
  const std::size_t n = ds.rows();
  const std::size_t k = ds.x.cols();
  auto feasible = [&](const Vector& h) {
    for (double v : h)
      if (!(v > 0.0 && v < 1.0)) return false;
    return true;
  };
  auto objective = [&](const Vector& h) {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (ds.y[i] > 0.0) ll += ds.w[i] * ds.y[i] * std::log(h[i]);
      if (ds.y[i] < 1.0) ll += ds.w[i] * (1.0 - ds.y[i]) * std::log1p(-h[i]);
    }
    return ll;
  };

  // weighted least squares start, else the constant model
  Vector wy(n);
  for (std::size_t i = 0; i < n; ++i) wy[i] = ds.w[i] * ds.y[i];
  Vector beta = Cholesky(weighted_gram(ds.x, ds.w)).solve(multiply_transposed(ds.x, wy));
  Vector h = multiply(ds.x, beta);
  if (!feasible(h)) {
    bool has_intercept = true;
    for (std::size_t i = 0; i < n; ++i) has_intercept = has_intercept && ds.x(i, 0) == 1.0;
    double sw = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sw += ds.w[i];
      swy += ds.w[i] * ds.y[i];
    }
    const double mean = swy / sw;
    if (!has_intercept || !(mean > 0.0 && mean < 1.0))
      fail(ErrorCode::IdentityLinkOutOfRange, "no feasible identity-link starting point");
    beta.assign(k, 0.0);
    beta[0] = mean;
    h = multiply(ds.x, beta);
  }

  FitResult result;
  double current = objective(h);
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    result.iterations = iter;
    Vector r(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double y = ds.y[i];
      r[i] = ds.w[i] * (y / h[i] - (1.0 - y) / (1.0 - h[i]));
      d[i] = ds.w[i] * (y / (h[i] * h[i]) + (1.0 - y) / ((1.0 - h[i]) * (1.0 - h[i])));
    }
    const Vector grad = multiply_transposed(ds.x, r);
    Matrix info = weighted_gram(ds.x, d);
    const Vector delta = Cholesky(info).solve(grad);
    result.max_score = max_abs(grad);
    if (result.max_score <= opts.tolerance && max_abs(delta) <= 1e-5 * (1.0 + max_abs(beta))) {
      result.converged = true;
      result.information = std::move(info);
      break;
    }
    double t = 1.0;
    bool accepted = false, blocked = false;
    Vector cand(k);
    for (int s = 0; s <= opts.max_step_halvings; ++s) {
      for (std::size_t j = 0; j < k; ++j) cand[j] = beta[j] + t * delta[j];
      const Vector hc = multiply(ds.x, cand);
      if (feasible(hc)) {
        const double v = objective(hc);
        if (v >= current - 1e-12 * std::abs(current)) {
          beta = cand;
          h = hc;
          current = v;
          accepted = true;
          break;
        }
      } else {
        blocked = true;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (result.max_score <= opts.tolerance) {
        result.converged = true;
        result.information = std::move(info);
        break;
      }
      if (blocked)
        fail(ErrorCode::IdentityLinkOutOfRange,
             "identity-link optimum lies on the boundary of (0,1) for some case-mix rows");
      fail(ErrorCode::NonConvergence, "identity-link projection stalled");
    }
  }
  if (!result.converged) fail(ErrorCode::NonConvergence, "identity-link projection did not converge");
  result.beta = std::move(beta);
  result.deviance = -2.0 * current;
  return result;
}

ProjectedModel self_project(const PackagedModel& model, const Dataset& case_mix,
                            std::span<const std::string> terms, Link link,
                            const FitOptions& opts) {
  const std::size_t n = case_mix.rows();
  if (n == 0) fail(ErrorCode::EmptyDataset, "case mix has no rows");

  // model design on the case mix
  Matrix design(n, model.dim());
  for (std::size_t j = 0; j < model.terms.size(); ++j) {
    const auto idx = find_term(case_mix.terms, model.terms[j].name);
    if (!idx)
      fail(ErrorCode::MissingColumn, "case mix lacks model term '" + model.terms[j].name + "'");
    for (std::size_t i = 0; i < n; ++i) design(i, j + 1) = case_mix.x(i, *idx + 1);
  }
  for (std::size_t i = 0; i < n; ++i) design(i, 0) = 1.0;

  const auto dists = linear_predictor_dists(model.beta, model.sigma, design);
  Vector targets(n);
  for (std::size_t i = 0; i < n; ++i)
    targets[i] = posterior_mean_quadrature(dists[i], model.quadrature_k);

  std::vector<std::string> names(terms.begin(), terms.end());
  if (names.empty())
    for (const auto& t : model.terms) names.push_back(t.name);

  Dataset soft;
  soft.x = Matrix(n, names.size() + 1);
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto idx = find_term(model.terms, names[j]);
    if (!idx) fail(ErrorCode::MissingColumn, "projection term '" + names[j] + "' is not a model term");
    soft.terms.push_back(model.terms[*idx]);
    for (std::size_t i = 0; i < n; ++i) soft.x(i, j + 1) = design(i, *idx + 1);
  }
  for (std::size_t i = 0; i < n; ++i) soft.x(i, 0) = 1.0;
  soft.y = targets;
  soft.w = case_mix.w;

  const FitResult fit = link == Link::Logit ? fit_logistic(soft, opts) : fit_identity_link(soft, opts);

  ProjectedModel out;
  out.terms = soft.terms;
  out.beta = fit.beta;
  out.link = link;
  out.source_fingerprint = model_fingerprint(model);
  out.iterations = fit.iterations;
  double total_w = 0.0, kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = out.predict_design(soft.x.row(i));
    if (link == Link::Identity && !(h > 0.0 && h < 1.0))
      fail(ErrorCode::IdentityLinkOutOfRange, "projected value outside (0,1)");
    kl += soft.w[i] * kl_bernoulli(targets[i], h);
    total_w += soft.w[i];
  }
  out.mean_residual_kl = kl / total_w;
  return out;
}

Vector pseudo_true_fit(const Dataset& population, std::span<const std::string> candidate_terms,
                       const FitOptions& opts) {
  for (double p : population.y)
    if (!(p > 0.0 && p < 1.0))
      fail(ErrorCode::RangeError, "pseudo-true fit needs true probabilities strictly inside (0,1)");
  if (candidate_terms.empty()) return fit_logistic(population, opts).beta;
  return fit_logistic(select_terms(population, candidate_terms), opts).beta;
}

}  // namespace credence
