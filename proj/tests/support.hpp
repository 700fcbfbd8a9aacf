// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0
//
// Independent oracles and fixture builders shared by the test binaries.
// Nothing here calls into the library's numerical routines being tested.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "credence/data.hpp"
#include "credence/linalg.hpp"

namespace credence::testing {

inline double ref_sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

inline double ref_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Adaptive Simpson quadrature with Richardson correction.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 60) {
  struct Rec {
    static double run(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb, double whole, double tol, int depth) {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const double delta = left + right - whole;
      if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
      return run(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
             run(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return Rec::run(f, a, b, fa, fm, fb, whole, tol, depth);
}

/// E[sigmoid(eta)], eta ~ N(mu, sigma^2), by adaptive integration over
/// mu +/- 14 sigma split at the mode regions.
inline double oracle_logit_normal_mean(double mu, double sigma) {
  if (sigma == 0.0) return ref_sigmoid(mu);
  auto f = [&](double z) { return ref_sigmoid(mu + sigma * z) * ref_normal_pdf(z); };
  double total = 0.0;
  for (int k = -14; k < 14; ++k) total += adaptive_simpson(f, k, k + 1, 1e-15);
  return total;
}

/// Random logistic fixture: intercept column plus p standard-normal columns.
inline Dataset random_logistic_dataset(std::uint64_t seed, std::size_t n, std::size_t p,
                                       double intercept = -0.5, double slope_scale = 0.6) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> norm;
  std::uniform_real_distribution<double> unif;
  Dataset ds;
  for (std::size_t j = 0; j < p; ++j) ds.terms.push_back({"x" + std::to_string(j + 1), TermKind::Continuous, {}});
  ds.x = Matrix(n, p + 1);
  std::vector<double> beta(p);
  for (double& b : beta) b = slope_scale * norm(rng);
  for (std::size_t i = 0; i < n; ++i) {
    ds.x(i, 0) = 1.0;
    double eta = intercept;
    for (std::size_t j = 0; j < p; ++j) {
      ds.x(i, j + 1) = norm(rng);
      eta += beta[j] * ds.x(i, j + 1);
    }
    ds.y.push_back(unif(rng) < ref_sigmoid(eta) ? 1.0 : 0.0);
  }
  ds.w.assign(n, 1.0);
  return ds;
}

inline double ref_loglik(const Dataset& ds, const std::vector<double>& beta) {
  double ll = 0.0;
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    double eta = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j) eta += ds.x(i, j) * beta[j];
    const double lp = eta >= 0 ? -std::log1p(std::exp(-eta)) : eta - std::log1p(std::exp(eta));
    const double lq = lp - eta;
    ll += ds.w[i] * (ds.y[i] * lp + (1.0 - ds.y[i]) * lq);
  }
  return ll;
}

/// Maximizes a smooth concave function with a plain damped Newton iteration on
/// finite-difference derivatives. Slow, but shares nothing with the library.
inline std::vector<double> fd_newton_maximize(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> x, int iterations = 60) {
  const std::size_t k = x.size();
  const double h = 1e-4;
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> g(k);
    std::vector<std::vector<double>> H(k, std::vector<double>(k));
    for (std::size_t a = 0; a < k; ++a) {
      auto xp = x, xm = x;
      xp[a] += h;
      xm[a] -= h;
      g[a] = (f(xp) - f(xm)) / (2 * h);
      for (std::size_t b = a; b < k; ++b) {
        auto pp = x, pm = x, mp = x, mm = x;
        pp[a] += h; pp[b] += h;
        pm[a] += h; pm[b] -= h;
        mp[a] -= h; mp[b] += h;
        mm[a] -= h; mm[b] -= h;
        H[a][b] = H[b][a] = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
      }
    }
    // solve (-H) d = g by Gaussian elimination with partial pivoting
    std::vector<std::vector<double>> A(k, std::vector<double>(k + 1));
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) A[a][b] = -H[a][b];
      A[a][k] = g[a];
    }
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < k; ++r)
        if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
      std::swap(A[c], A[piv]);
      for (std::size_t r = c + 1; r < k; ++r) {
        const double m = A[r][c] / A[c][c];
        for (std::size_t q = c; q <= k; ++q) A[r][q] -= m * A[c][q];
      }
    }
    std::vector<double> d(k);
    for (std::size_t c = k; c-- > 0;) {
      double s = A[c][k];
      for (std::size_t q = c + 1; q < k; ++q) s -= A[c][q] * d[q];
      d[c] = s / A[c][c];
    }
    double t = 1.0;
    const double f0 = f(x);
    std::vector<double> cand(k);
    for (int s = 0; s < 30; ++s) {
      for (std::size_t a = 0; a < k; ++a) cand[a] = x[a] + t * d[a];
      if (f(cand) >= f0) break;
      t *= 0.5;
    }
    double step = 0.0;
    for (std::size_t a = 0; a < k; ++a) step = std::max(step, std::abs(cand[a] - x[a]));
    x = cand;
    if (step < 1e-12) break;
  }
  return x;
}

/// Golden-section maximization of a unimodal function, used by grid/oracle checks.
inline double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d; d = c; fd = fc; c = b - r * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd; d = a + r * (b - a); fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace credence::testing

namespace credence::testing {

/// log det of a small symmetric positive-definite matrix by elimination.
inline double ref_log_det(std::vector<std::vector<double>> a) {
  const std::size_t k = a.size();
  double ld = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    ld += std::log(a[c][c]);
    for (std::size_t r = c + 1; r < k; ++r) {
      const double m = a[r][c] / a[c][c];
      for (std::size_t q = c; q < k; ++q) a[r][q] -= m * a[c][q];
    }
  }
  return ld;
}

/// Fisher information X^T diag(w p (1-p)) X by explicit loops.
inline std::vector<std::vector<double>> ref_fisher(const Dataset& ds, const std::vector<double>& beta) {
  const std::size_t k = beta.size();
  std::vector<std::vector<double>> I(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    double eta = 0.0;
    for (std::size_t j = 0; j < k; ++j) eta += ds.x(i, j) * beta[j];
    const double p = ref_sigmoid(eta);
    const double v = ds.w[i] * p * (1.0 - p);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) I[a][b] += v * ds.x(i, a) * ds.x(i, b);
  }
  return I;
}

/// Jeffreys-penalised log-likelihood, written directly from its definition.
inline double ref_firth_objective(const Dataset& ds, const std::vector<double>& beta) {
  return ref_loglik(ds, beta) + 0.5 * ref_log_det(ref_fisher(ds, beta));
}

}  // namespace credence::testing

namespace credence::testing {

/// Solves A x = b for a small dense system (partial pivoting).
inline std::vector<double> ref_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t k = b.size();
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < k; ++r) {
      const double m = A[r][c] / A[c][c];
      for (std::size_t q = c; q < k; ++q) A[r][q] -= m * A[c][q];
      b[r] -= m * b[c];
    }
  }
  std::vector<double> x(k);
  for (std::size_t c = k; c-- > 0;) {
    double s = b[c];
    for (std::size_t q = c + 1; q < k; ++q) s -= A[c][q] * x[q];
    x[c] = s / A[c][c];
  }
  return x;
}

/// Newton's method on an objective with analytic gradient g and negative
/// Hessian H supplied by the caller; step-halving on the objective f.
inline std::vector<double> analytic_newton(
    const std::function<double(const std::vector<double>&)>& f,
    const std::function<void(const std::vector<double>&, std::vector<double>&,
                             std::vector<std::vector<double>>&)>& derivs,
    std::vector<double> x, int iterations = 200) {
  const std::size_t k = x.size();
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> g(k);
    std::vector<std::vector<double>> H(k, std::vector<double>(k, 0.0));
    derivs(x, g, H);
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax < 1e-12) break;
    const auto d = ref_solve(H, g);
    const double f0 = f(x);
    double t = 1.0;
    std::vector<double> cand(k);
    for (int s = 0; s < 40; ++s) {
      for (std::size_t a = 0; a < k; ++a) cand[a] = x[a] + t * d[a];
      if (f(cand) >= f0 - 1e-14 * std::abs(f0)) break;
      t *= 0.5;
    }
    x = cand;
  }
  return x;
}

/// Direct log-F(m,m)-penalised maximum likelihood: maximizes
/// loglik + sum_{j in penalised} (m b_j / 2 - m log(1 + e^{b_j})).
inline std::vector<double> oracle_logf_fit(const Dataset& ds, double m, const std::vector<bool>& penalised) {
  const std::size_t k = ds.x.cols();
  auto prior = [&](double b) { return 0.5 * m * b - m * (b > 0 ? b + std::log1p(std::exp(-b)) : std::log1p(std::exp(b))); };
  auto f = [&](const std::vector<double>& b) {
    double v = ref_loglik(ds, b);
    for (std::size_t j = 0; j < k; ++j)
      if (penalised[j]) v += prior(b[j]);
    return v;
  };
  auto derivs = [&](const std::vector<double>& b, std::vector<double>& g, std::vector<std::vector<double>>& H) {
    for (std::size_t i = 0; i < ds.rows(); ++i) {
      double eta = 0.0;
      for (std::size_t j = 0; j < k; ++j) eta += ds.x(i, j) * b[j];
      const double p = ref_sigmoid(eta);
      for (std::size_t a = 0; a < k; ++a) {
        g[a] += ds.w[i] * (ds.y[i] - p) * ds.x(i, a);
        for (std::size_t c = 0; c < k; ++c) H[a][c] += ds.w[i] * p * (1 - p) * ds.x(i, a) * ds.x(i, c);
      }
    }
    for (std::size_t j = 0; j < k; ++j)
      if (penalised[j]) {
        const double s = ref_sigmoid(b[j]);
        g[j] += 0.5 * m - m * s;
        H[j][j] += m * s * (1 - s);
      }
  };
  return analytic_newton(f, derivs, std::vector<double>(k, 0.0));
}

/// Laplace log marginal likelihood of the ridge model at precision lambda on a
/// dataset standardized here with the sample SD; intercept unpenalised.
inline double oracle_ridge_log_marginal(const Dataset& ds, double lambda) {
  const std::size_t n = ds.rows(), k = ds.x.cols();
  Dataset s = ds;
  for (std::size_t j = 1; j < k; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += ds.x(i, j);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (ds.x(i, j) - mean) * (ds.x(i, j) - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    for (std::size_t i = 0; i < n; ++i) s.x(i, j) = (ds.x(i, j) - mean) / sd;
  }
  auto f = [&](const std::vector<double>& b) {
    double pen = 0.0;
    for (std::size_t j = 1; j < k; ++j) pen += b[j] * b[j];
    return ref_loglik(s, b) - 0.5 * lambda * pen;
  };
  auto derivs = [&](const std::vector<double>& b, std::vector<double>& g, std::vector<std::vector<double>>& H) {
    const auto I = ref_fisher(s, b);
    for (std::size_t i = 0; i < n; ++i) {
      double eta = 0.0;
      for (std::size_t j = 0; j < k; ++j) eta += s.x(i, j) * b[j];
      for (std::size_t a = 0; a < k; ++a) g[a] += s.w[i] * (s.y[i] - ref_sigmoid(eta)) * s.x(i, a);
    }
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t c = 0; c < k; ++c) H[a][c] = I[a][c];
    for (std::size_t j = 1; j < k; ++j) {
      g[j] -= lambda * b[j];
      H[j][j] += lambda;
    }
  };
  const auto b = analytic_newton(f, derivs, std::vector<double>(k, 0.0));
  auto H = ref_fisher(s, b);
  for (std::size_t j = 1; j < k; ++j) H[j][j] += lambda;
  return f(b) + 0.5 * static_cast<double>(k - 1) * std::log(lambda) - 0.5 * ref_log_det(H);
}

}  // namespace credence::testing
