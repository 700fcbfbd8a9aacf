// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace credence {

double std_normal_pdf(double x);

/// Phi(x), via erfc so the lower tail keeps full relative accuracy.
double std_normal_cdf(double x);

/// Phi^{-1}(p) for 0 < p < 1. Rational approximation followed by one Halley
/// step. Throws DomainError outside the open interval.
double std_normal_quantile(double p);

}  // namespace credence
