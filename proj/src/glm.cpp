// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include "credence/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "credence/error.hpp"

namespace credence {

double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

double log_sigmoid(double eta) {
  if (eta >= 0.0) return -std::log1p(std::exp(-eta));
  return eta - std::log1p(std::exp(eta));
}

namespace {

constexpr double kSeparationNorm = 1e3;
constexpr double kSaturationEta = 15.0;
constexpr double kStepTolerance = 1e-5;

void check_inputs(const Dataset& ds, std::span<const double> beta) {
  if (ds.x.rows() == 0) fail(ErrorCode::EmptyDataset, "cannot fit an empty dataset");
  if (ds.y.size() != ds.x.rows() || ds.w.size() != ds.x.rows())
    fail(ErrorCode::DimensionMismatch, "responses/weights do not match design rows");
  if (!beta.empty() && beta.size() != ds.x.cols())
    fail(ErrorCode::DimensionMismatch, "coefficient vector does not match design columns");
  for (std::size_t i = 0; i < ds.y.size(); ++i) {
    if (!(ds.y[i] >= 0.0 && ds.y[i] <= 1.0))
      fail(ErrorCode::RangeError, "response outside [0,1] at row " + std::to_string(i + 1));
    if (!(ds.w[i] > 0.0))
      fail(ErrorCode::RangeError, "non-positive weight at row " + std::to_string(i + 1));
  }
}

// Full column rank test on the correlation-scaled weighted Gram matrix.
void check_rank(const Dataset& ds) {
  const Matrix g = weighted_gram(ds.x, ds.w);
  const std::size_t k = g.cols();
  Matrix scaled(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(g(i, i) > 0.0))
      fail(ErrorCode::RankDeficient, "design column " + std::to_string(i) + " is all zeros");
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) scaled(i, j) = g(i, j) / std::sqrt(g(i, i) * g(j, j));
  try {
    Cholesky chol(scaled);
    for (std::size_t j = 0; j < k; ++j)
      if (chol.lower()(j, j) * chol.lower()(j, j) < 1e-12)
        fail(ErrorCode::RankDeficient, "design matrix is not of full column rank");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::RankDeficient) throw;
    fail(ErrorCode::RankDeficient, "design matrix is not of full column rank");
  }
  if (ds.x.rows() < k)
    fail(ErrorCode::RankDeficient, "fewer rows than coefficients");
}

struct Probabilities {
  Vector eta;
  Vector p;
};

Probabilities probabilities(const Dataset& ds, std::span<const double> beta) {
  Probabilities out;
  out.eta = multiply(ds.x, beta);
  out.p.resize(out.eta.size());
  for (std::size_t i = 0; i < out.eta.size(); ++i) out.p[i] = sigmoid(out.eta[i]);
  return out;
}

double loglik_from_eta(const Dataset& ds, std::span<const double> eta) {
  double ll = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const double y = ds.y[i];
    double term = 0.0;
    if (y > 0.0) term += y * log_sigmoid(eta[i]);
    if (y < 1.0) term += (1.0 - y) * log_sigmoid(-eta[i]);
    ll += ds.w[i] * term;
  }
  return ll;
}

struct Derivatives {
  Vector gradient;
  Matrix information;
};

// Rows whose hard label is reproduced with a saturated linear predictor.
bool saturated(const Dataset& ds, std::span<const double> beta) {
  const Vector eta = multiply(ds.x, beta);
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (ds.y[i] == 1.0 && eta[i] > kSaturationEta) return true;
    if (ds.y[i] == 0.0 && eta[i] < -kSaturationEta) return true;
  }
  return false;
}

[[noreturn]] void report_separation(double norm) {
  std::ostringstream msg;
  msg << "quasi-complete separation: coefficients diverge (max |beta| = " << norm
      << "); the maximum likelihood estimate does not exist. Use a Jeffreys or log-F prior";
  fail(ErrorCode::Separation, msg.str());
}

// Damped Newton ascent with step halving on the objective.
template <class Value, class Derivs>
FitResult newton_ascent(const Dataset& ds, Vector beta, const FitOptions& opts,
                        Value&& value, Derivs&& derivs, bool detect_separation) {
  if (!(opts.tolerance > 0.0) || opts.max_iterations < 1 || opts.max_step_halvings < 1)
    fail(ErrorCode::InvalidArgument, "invalid fit options");
  FitResult result;
  double current = value(beta);
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    result.iterations = iter;
    Derivatives d;
    Vector delta;
    try {
      d = derivs(beta);
      delta = Cholesky(d.information).solve(d.gradient);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotPositiveDefinite) throw;
      if (detect_separation && (max_abs(beta) > 20.0 || saturated(ds, beta)))
        report_separation(max_abs(beta));
      fail(ErrorCode::RankDeficient, "information matrix became singular during fitting");
    }
    result.max_score = max_abs(d.gradient);
    const double step = max_abs(delta);
    if (result.max_score <= opts.tolerance &&
        step <= kStepTolerance * (1.0 + max_abs(beta))) {
      // vanishing score reached only by pushing labelled rows to 0/1
      if (detect_separation && max_abs(beta) > 20.0 && saturated(ds, beta))
        report_separation(max_abs(beta));
      result.converged = true;
      result.information = std::move(d.information);
      break;
    }

    double t = 1.0;
    bool accepted = false;
    Vector candidate(beta.size());
    for (int h = 0; h <= opts.max_step_halvings; ++h) {
      for (std::size_t j = 0; j < beta.size(); ++j) candidate[j] = beta[j] + t * delta[j];
      const double v = value(candidate);
      if (std::isfinite(v) && v >= current - 1e-12 * std::abs(current)) {
        current = v;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (result.max_score <= opts.tolerance) {
        // a stall with saturated fitted labels is divergence, not an optimum
        if (detect_separation && saturated(ds, beta)) report_separation(max_abs(beta));
        // numerically at the optimum; no further ascent is representable
        result.converged = true;
        result.information = std::move(d.information);
        break;
      }
      fail(ErrorCode::NonConvergence, "step halving failed to improve the objective");
    }
    beta = candidate;
    if (detect_separation && max_abs(beta) > kSeparationNorm) report_separation(max_abs(beta));
  }
  if (!result.converged) {
    if (detect_separation && saturated(ds, beta)) report_separation(max_abs(beta));
    std::ostringstream msg;
    msg << "no convergence after " << opts.max_iterations << " iterations (max |score| = "
        << result.max_score << ")";
    fail(ErrorCode::NonConvergence, msg.str());
  }
  result.beta = std::move(beta);
  result.deviance = -2.0 * loglik_from_eta(ds, multiply(ds.x, result.beta));
  return result;
}

Vector zero_start(const Dataset& ds, std::span<const double> start) {
  if (!start.empty()) return Vector(start.begin(), start.end());
  return Vector(ds.x.cols(), 0.0);
}

// T_r = X^T diag(a * x_r) X for every column r.
std::vector<Matrix> third_moment_slices(const Dataset& ds, std::span<const double> a) {
  const std::size_t k = ds.x.cols();
  std::vector<Matrix> slices;
  slices.reserve(k);
  Vector weights(ds.rows());
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t i = 0; i < ds.rows(); ++i) weights[i] = a[i] * ds.x(i, r);
    slices.push_back(weighted_gram(ds.x, weights));
  }
  return slices;
}

struct FirthTerms {
  Probabilities prob;
  Matrix information;
  Cholesky chol;
};

FirthTerms firth_terms(const Dataset& ds, std::span<const double> beta) {
  Probabilities prob = probabilities(ds, beta);
  Vector d(ds.rows());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = ds.w[i] * prob.p[i] * (1.0 - prob.p[i]);
  Matrix info = weighted_gram(ds.x, d);
  Cholesky chol(info);
  return {std::move(prob), std::move(info), std::move(chol)};
}

Vector firth_gradient(const Dataset& ds, const FirthTerms& t, const Matrix& inv) {
  const Vector q = row_quadratic_forms(ds.x, inv);
  Vector r(ds.rows());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double p = t.prob.p[i];
    const double h = ds.w[i] * p * (1.0 - p) * q[i];
    r[i] = ds.w[i] * (ds.y[i] - p) + h * (0.5 - p);
  }
  return multiply_transposed(ds.x, r);
}

Matrix firth_negative_hessian(const Dataset& ds, const FirthTerms& t, const Matrix& inv) {
  const std::size_t n = ds.rows();
  const std::size_t k = ds.x.cols();
  const Vector q = row_quadratic_forms(ds.x, inv);
  Vector cq(n), a(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = t.prob.p[i];
    const double v = ds.w[i] * p * (1.0 - p);
    cq[i] = v * ((1.0 - 2.0 * p) * (1.0 - 2.0 * p) - 2.0 * p * (1.0 - p)) * q[i];
    a[i] = v * (1.0 - 2.0 * p);
  }
  // Hessian of 0.5 log det I:
  //   0.5 X^T diag(c q) X - 0.5 tr(T_r A T_s A)
  const Matrix first = weighted_gram(ds.x, cq);
  const std::vector<Matrix> slices = third_moment_slices(ds, a);
  std::vector<Matrix> products;
  products.reserve(k);
  for (const auto& s : slices) products.push_back(multiply(s, inv));
  Matrix out = t.information;
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t s = r; s < k; ++s) {
      double tr = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) tr += products[r](i, j) * products[s](j, i);
      const double hess = 0.5 * first(r, s) - 0.5 * tr;
      out(r, s) -= hess;
      if (s != r) out(s, r) = out(r, s);
    }
  return out;
}

}  // namespace

double log_likelihood(const Dataset& ds, std::span<const double> beta) {
  check_inputs(ds, beta);
  return loglik_from_eta(ds, multiply(ds.x, beta));
}

Vector score(const Dataset& ds, std::span<const double> beta) {
  check_inputs(ds, beta);
  const Probabilities prob = probabilities(ds, beta);
  Vector r(ds.rows());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = ds.w[i] * (ds.y[i] - prob.p[i]);
  return multiply_transposed(ds.x, r);
}

Matrix fisher_information(const Dataset& ds, std::span<const double> beta) {
  check_inputs(ds, beta);
  const Probabilities prob = probabilities(ds, beta);
  Vector d(ds.rows());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = ds.w[i] * prob.p[i] * (1.0 - prob.p[i]);
  return weighted_gram(ds.x, d);
}

double firth_log_likelihood(const Dataset& ds, std::span<const double> beta) {
  check_inputs(ds, beta);
  const FirthTerms t = firth_terms(ds, beta);
  return loglik_from_eta(ds, t.prob.eta) + 0.5 * t.chol.log_det();
}

Vector firth_score(const Dataset& ds, std::span<const double> beta) {
  check_inputs(ds, beta);
  const FirthTerms t = firth_terms(ds, beta);
  return firth_gradient(ds, t, t.chol.inverse());
}

Matrix firth_information(const Dataset& ds, std::span<const double> beta) {
  check_inputs(ds, beta);
  const FirthTerms t = firth_terms(ds, beta);
  return firth_negative_hessian(ds, t, t.chol.inverse());
}

FitResult fit_logistic_penalized(const Dataset& ds, std::span<const double> penalty,
                                 const FitOptions& opts, std::span<const double> start) {
  check_inputs(ds, start);
  if (!penalty.empty() && penalty.size() != ds.x.cols())
    fail(ErrorCode::DimensionMismatch, "penalty vector does not match design columns");
  const bool penalised = std::any_of(penalty.begin(), penalty.end(), [](double v) { return v > 0.0; });
  if (!penalised) check_rank(ds);

  auto value = [&](std::span<const double> beta) {
    double v = loglik_from_eta(ds, multiply(ds.x, beta));
    for (std::size_t j = 0; j < penalty.size(); ++j) v -= 0.5 * penalty[j] * beta[j] * beta[j];
    return v;
  };
  auto derivs = [&](std::span<const double> beta) {
    const Probabilities prob = probabilities(ds, beta);
    Vector r(ds.rows()), d(ds.rows());
    for (std::size_t i = 0; i < r.size(); ++i) {
      r[i] = ds.w[i] * (ds.y[i] - prob.p[i]);
      d[i] = ds.w[i] * prob.p[i] * (1.0 - prob.p[i]);
    }
    Derivatives out{multiply_transposed(ds.x, r), weighted_gram(ds.x, d)};
    for (std::size_t j = 0; j < penalty.size(); ++j) {
      out.gradient[j] -= penalty[j] * beta[j];
      out.information(j, j) += penalty[j];
    }
    return out;
  };
  return newton_ascent(ds, zero_start(ds, start), opts, value, derivs, !penalised);
}

FitResult fit_logistic(const Dataset& ds, const FitOptions& opts) {
  return fit_logistic_penalized(ds, {}, opts);
}

FitResult fit_firth(const Dataset& ds, const FitOptions& opts) {
  check_inputs(ds, {});
  check_rank(ds);
  auto value = [&](std::span<const double> beta) {
    try {
      const FirthTerms t = firth_terms(ds, beta);
      return loglik_from_eta(ds, t.prob.eta) + 0.5 * t.chol.log_det();
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  auto derivs = [&](std::span<const double> beta) {
    const FirthTerms t = firth_terms(ds, beta);
    const Matrix inv = t.chol.inverse();
    Derivatives out{firth_gradient(ds, t, inv), firth_negative_hessian(ds, t, inv)};
    try {
      Cholesky check(out.information);
    } catch (const Error&) {
      out.information = t.information;  // Fisher scoring step
    }
    return out;
  };
  return newton_ascent(ds, Vector(ds.x.cols(), 0.0), opts, value, derivs, false);
}

Matrix covariance(const FitResult& fit) {
  if (!fit.converged) fail(ErrorCode::NonConvergence, "covariance requires a converged fit");
  return Cholesky(fit.information).inverse();
}

}  // namespace credence
