// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include "credence/gauss_hermite.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "credence/error.hpp"

namespace credence {
namespace {

// Off-diagonal of the Jacobi matrix for the Hermite weight: b_j = sqrt(j/2).
double jacobi_offdiag(int j) { return std::sqrt(0.5 * j); }

// Number of eigenvalues of the (zero-diagonal) Jacobi matrix below x,
// by the Sturm sequence of leading principal minors.
int eigenvalues_below(int order, double x) {
  int count = 0;
  double q = -x;
  if (q < 0.0) ++count;
  for (int i = 1; i < order; ++i) {
    if (q == 0.0) q = 1e-300;
    const double b = jacobi_offdiag(i);
    q = -x - b * b / q;
    if (q < 0.0) ++count;
  }
  return count;
}

// k-th smallest eigenvalue by bisection.
double eigenvalue(int order, int k, double bound) {
  double lo = -bound, hi = bound;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (eigenvalues_below(order, mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

struct Orthonormal {
  double value;         // p_K(x)
  double derivative;    // p_K'(x)
  double christoffel;   // sum_{j<K} p_j(x)^2
};

// Orthonormal Hermite polynomials w.r.t. exp(-x^2) via the three-term
// recurrence x p_j = b_{j+1} p_{j+1} + b_j p_{j-1}.
Orthonormal evaluate(int order, double x) {
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25);
  double sum_sq = cur * cur;
  for (int j = 0; j < order; ++j) {
    const double next = (x * cur - jacobi_offdiag(j) * prev) / jacobi_offdiag(j + 1);
    prev = cur;
    cur = next;
    if (j + 1 < order) sum_sq += cur * cur;
  }
  return {cur, std::sqrt(2.0 * order) * prev, sum_sq};
}

}  // namespace

GaussHermiteRule gauss_hermite_rule(int order) {
  if (order < 1 || order > kMaxGaussHermiteOrder)
    fail(ErrorCode::InvalidArgument,
         "Gauss-Hermite order must be in [1, 100], got " + std::to_string(order));

  GaussHermiteRule rule;
  rule.order = order;
  rule.nodes.resize(order);
  rule.weights.resize(order);

  const double bound = 2.0 * jacobi_offdiag(order) + 1.0;
  for (int k = 0; k < order; ++k) {
    double x = eigenvalue(order, k, bound);
    for (int polish = 0; polish < 3; ++polish) {
      const Orthonormal p = evaluate(order, x);
      if (p.derivative == 0.0) break;
      x -= p.value / p.derivative;
    }
    rule.nodes[k] = x;
    rule.weights[k] = 1.0 / evaluate(order, x).christoffel;
  }

  // enforce exact symmetry about zero
  for (int k = 0; k < order / 2; ++k) {
    const int m = order - 1 - k;
    const double node = 0.5 * (rule.nodes[m] - rule.nodes[k]);
    const double weight = 0.5 * (rule.weights[m] + rule.weights[k]);
    rule.nodes[k] = -node;
    rule.nodes[m] = node;
    rule.weights[k] = rule.weights[m] = weight;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

const GaussHermiteRule& cached_gauss_hermite_rule(int order) {
  if (order < 1 || order > kMaxGaussHermiteOrder)
    fail(ErrorCode::InvalidArgument,
         "Gauss-Hermite order must be in [1, 100], got " + std::to_string(order));
  static std::mutex mutex;
  static std::array<std::unique_ptr<GaussHermiteRule>, kMaxGaussHermiteOrder + 1> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussHermiteRule>(gauss_hermite_rule(order));
  return *slot;
}

}  // namespace credence
