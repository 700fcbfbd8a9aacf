// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace credence {

/// K-point Gauss-Hermite rule for integrals against exp(-x^2).
/// Nodes are strictly increasing and symmetric about zero; the weights sum
/// to sqrt(pi).
struct GaussHermiteRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline constexpr int kMaxGaussHermiteOrder = 100;

/// Golub-Welsch: eigenvalues of the Hermite Jacobi matrix give the nodes,
/// the squared first eigenvector components give the weights. 1 <= K <= 100.
GaussHermiteRule gauss_hermite_rule(int order);

/// Process-wide cache of gauss_hermite_rule; thread safe.
const GaussHermiteRule& cached_gauss_hermite_rule(int order);

}  // namespace credence
