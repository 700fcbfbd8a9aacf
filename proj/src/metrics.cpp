// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include "credence/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "credence/error.hpp"
#include "credence/glm.hpp"
#include "credence/normal.hpp"

namespace credence {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) fail(ErrorCode::DimensionMismatch, "metric inputs differ in length");
}

void require_probability(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0))
    fail(ErrorCode::RangeError, std::string(what) + " values must lie in [0,1]");
}

std::vector<double> finite_values(std::span<const double> values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values)
    if (std::isfinite(v)) out.push_back(v);
  return out;
}

double sorted_quantile(const std::vector<double>& v, double q) {
  if (v.empty()) return kNaN;
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

double mse_vs_truth(std::span<const double> pi, std::span<const double> truth) {
  require_same_length(pi.size(), truth.size());
  if (pi.empty()) fail(ErrorCode::EmptyDataset, "no predictions");
  double sum = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    require_probability(pi[i], "prediction");
    require_probability(truth[i], "truth");
    sum += truth[i] * (1.0 - pi[i]) * (1.0 - pi[i]) + (1.0 - truth[i]) * pi[i] * pi[i];
  }
  return sum / static_cast<double>(pi.size());
}

double c_statistic(std::span<const double> pi, std::span<const double> reference) {
  require_same_length(pi.size(), reference.size());
  const std::size_t n = pi.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pi[a] < pi[b]; });

  double total_event = 0.0, total_non = 0.0, self = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    require_probability(reference[i], "reference");
    total_event += reference[i];
    total_non += 1.0 - reference[i];
    self += reference[i] * (1.0 - reference[i]);
  }
  const double denom = total_event * total_non - self;
  if (!(denom > 0.0))
    fail(ErrorCode::UndefinedMetric, "c-statistic needs both events and non-events");

  double numer = 0.0;
  double non_below = 0.0;  // non-event weight strictly below the current group
  std::size_t g = 0;
  while (g < n) {
    std::size_t e = g;
    double grp_event = 0.0, grp_non = 0.0, grp_self = 0.0;
    while (e < n && pi[order[e]] == pi[order[g]]) {
      const double r = reference[order[e]];
      grp_event += r;
      grp_non += 1.0 - r;
      grp_self += r * (1.0 - r);
      ++e;
    }
    numer += grp_event * non_below + 0.5 * (grp_event * grp_non - grp_self);
    non_below += grp_non;
    g = e;
  }
  return numer / denom;
}

double oe_ratio(std::span<const double> reference, std::span<const double> pi) {
  require_same_length(pi.size(), reference.size());
  double observed = 0.0, expected = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    observed += reference[i];
    expected += pi[i];
  }
  if (!(expected > 0.0)) fail(ErrorCode::UndefinedMetric, "O/E is undefined with zero expected events");
  return observed / expected;
}

std::pair<double, double> calibration_intercept_slope(std::span<const double> reference,
                                                      std::span<const double> pi) {
  require_same_length(pi.size(), reference.size());
  const std::size_t n = pi.size();
  if (n < 2) fail(ErrorCode::SlopeUndefined, "calibration slope needs at least two predictions");
  Dataset ds;
  ds.x = Matrix(n, 2);
  ds.y.assign(reference.begin(), reference.end());
  ds.w.assign(n, 1.0);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    require_probability(reference[i], "reference");
    const double p = std::clamp(pi[i], kCalibrationClamp, 1.0 - kCalibrationClamp);
    const double lp = logit(p);
    ds.x(i, 0) = 1.0;
    ds.x(i, 1) = lp;
    lo = std::min(lo, lp);
    hi = std::max(hi, lp);
  }
  if (!(hi > lo)) fail(ErrorCode::SlopeUndefined, "calibration slope is undefined for constant predictions");
  ds.terms.push_back(TermSpec{"logit_pi", TermKind::Continuous, {}});
  const FitResult fit = fit_logistic(ds);
  return {fit.beta[0], fit.beta[1]};
}

double cri_coverage(std::span<const std::pair<double, double>> cris,
                    std::span<const double> truths) {
  require_same_length(cris.size(), truths.size());
  if (cris.empty()) fail(ErrorCode::EmptyDataset, "no intervals");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < cris.size(); ++i)
    if (cris[i].first <= truths[i] && truths[i] <= cris[i].second) ++hit;
  return static_cast<double>(hit) / static_cast<double>(cris.size());
}

std::vector<double> posterior_cdf_calibration(std::span<const LinearPredictorDist> dists,
                                              std::span<const double> truths,
                                              std::span<const double> probes) {
  require_same_length(dists.size(), truths.size());
  if (dists.empty()) fail(ErrorCode::EmptyDataset, "no posteriors");
  for (double x : probes)
    if (!(x > 0.0 && x < 1.0)) fail(ErrorCode::DomainError, "CDF probes must lie in (0,1)");
  std::vector<double> u(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) {
    if (!(dists[i].sigma > 0.0))
      fail(ErrorCode::DegenerateDistribution, "CDF calibration needs sigma > 0 for every row");
    require_probability(truths[i], "truth");
    if (truths[i] == 0.0) u[i] = 0.0;
    else if (truths[i] == 1.0) u[i] = 1.0;
    else u[i] = std_normal_cdf((logit(truths[i]) - dists[i].mu) / dists[i].sigma);
  }
  std::sort(u.begin(), u.end());
  std::vector<double> out;
  out.reserve(probes.size());
  for (double x : probes) {
    const auto below = std::upper_bound(u.begin(), u.end(), x) - u.begin();
    out.push_back(static_cast<double>(below) / static_cast<double>(u.size()));
  }
  return out;
}

MeanSd mean_sd(std::span<const double> values) {
  const std::vector<double> v = finite_values(values);
  MeanSd out;
  out.count = v.size();
  if (v.empty()) return {kNaN, kNaN, 0};
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() < 2) {
    out.sd = kNaN;
    return out;
  }
  double ss = 0.0;
  for (double x : v) ss += (x - out.mean) * (x - out.mean);
  out.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return out;
}

MedianIqr median_iqr(std::span<const double> values) {
  std::vector<double> v = finite_values(values);
  std::sort(v.begin(), v.end());
  return {sorted_quantile(v, 0.5), sorted_quantile(v, 0.25), sorted_quantile(v, 0.75), v.size()};
}

double quantile(std::span<const double> values, double q) {
  if (!(q >= 0.0 && q <= 1.0)) fail(ErrorCode::InvalidArgument, "quantile level must lie in [0,1]");
  std::vector<double> v = finite_values(values);
  std::sort(v.begin(), v.end());
  return sorted_quantile(v, q);
}

}  // namespace credence
