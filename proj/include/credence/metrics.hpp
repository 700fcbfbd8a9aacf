// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0
//
// Performance metrics. A "reference" is either observed 0/1 labels or true
// event probabilities; truth-referenced metrics integrate out Bernoulli noise.

#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "credence/predict.hpp"

namespace credence {

/// Mean of p (1 - pi)^2 + (1 - p) pi^2: expected squared error against a
/// Bernoulli(p) outcome.
double mse_vs_truth(std::span<const double> pi, std::span<const double> truth);

/// Concordance probability; reference weights p_i (1 - p_j) over ordered pairs,
/// ties in pi count one half. O(n log n).
double c_statistic(std::span<const double> pi, std::span<const double> reference);

/// sum(reference) / sum(pi).
double oe_ratio(std::span<const double> reference, std::span<const double> pi);

inline constexpr double kCalibrationClamp = 1e-12;

/// (a, b) of the logistic fit reference ~ a + b logit(pi) with pi clamped to
/// [1e-12, 1 - 1e-12]. Throws SlopeUndefined for constant predictions.
std::pair<double, double> calibration_intercept_slope(std::span<const double> reference,
                                                      std::span<const double> pi);

/// Proportion of intervals with lo <= truth <= hi.
double cri_coverage(std::span<const std::pair<double, double>> cris,
                    std::span<const double> truths);

inline constexpr std::array<double, 3> kDefaultCdfProbes{0.1, 0.5, 0.9};

/// Empirical CDF, at each probe, of u_i = Phi((logit(truth_i) - mu_i) / sigma_i).
std::vector<double> posterior_cdf_calibration(std::span<const LinearPredictorDist> dists,
                                              std::span<const double> truths,
                                              std::span<const double> probes = kDefaultCdfProbes);

/// Per-replicate metrics for one (prior, estimator). Undefined entries are NaN.
struct MetricReport {
  double mse = 0.0;
  double c_statistic = 0.0;
  double oe_ratio = 0.0;
  double calibration_intercept = 0.0;
  double calibration_slope = 0.0;
  std::vector<double> snb;      // one per threshold
  double coverage = 0.0;        // NaN when the estimator has no interval
  std::array<double, 3> cdf_hat{};  // NaN when not applicable
};

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t count = 0;
};

struct MedianIqr {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  std::size_t count = 0;
};

/// Non-finite values are ignored; an empty input gives NaN summaries.
MeanSd mean_sd(std::span<const double> values);
MedianIqr median_iqr(std::span<const double> values);

/// Linear-interpolation quantile (type 7) of finite values.
double quantile(std::span<const double> values, double q);

}  // namespace credence
