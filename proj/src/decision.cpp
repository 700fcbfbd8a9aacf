// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include "credence/decision.hpp"

#include <algorithm>

#include "credence/error.hpp"

namespace credence {

Threshold::Threshold(double z) : z_(z) {
  if (!(z > 0.0 && z < 1.0)) fail(ErrorCode::InvalidArgument, "threshold must satisfy 0 < z < 1");
}

Threshold Utilities::threshold() const {
  if (!well_ordered())
    fail(ErrorCode::InvalidArgument, "utilities must satisfy u11 > u01 and u00 > u10");
  const double harm = u00 - u10;
  return Threshold(harm / (harm + u11 - u01));
}

double Utilities::expected(bool treat, double pi) const noexcept {
  return treat ? pi * u11 + (1.0 - pi) * u10 : pi * u01 + (1.0 - pi) * u00;
}

double net_benefit(double pi, Threshold z) noexcept {
  return (pi - z.value()) / (1.0 - z.value());
}

const char* to_string(Decision d) { return d == Decision::Treat ? "treat" : "no-treat"; }

Decision treat_decision(double post_mean, Threshold z) noexcept {
  return post_mean >= z.value() ? Decision::Treat : Decision::NoTreat;
}

SnbParts snb_parts(std::span<const double> predictions, std::span<const double> reference,
                   Threshold z) {
  if (predictions.size() != reference.size())
    fail(ErrorCode::DimensionMismatch, "predictions and reference differ in length");
  if (predictions.empty()) fail(ErrorCode::EmptyDataset, "no predictions");
  const double odds = z.value() / (1.0 - z.value());
  const double n = static_cast<double>(predictions.size());
  SnbParts out;
  double sum_model = 0.0, sum_all = 0.0, sum_ref = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double r = reference[i];
    if (!(r >= 0.0 && r <= 1.0)) fail(ErrorCode::RangeError, "reference values must lie in [0,1]");
    const double gain = r - odds * (1.0 - r);
    if (predictions[i] >= z.value()) sum_model += gain;
    sum_all += gain;
    sum_ref += r;
  }
  out.nb_model = sum_model / n;
  out.nb_treat_all = sum_all / n;
  out.nb_default = std::max(out.nb_treat_all, 0.0);
  out.prevalence = sum_ref / n;
  if (out.prevalence == 0.0)
    fail(ErrorCode::UndefinedMetric, "sNB is undefined when the reference prevalence is zero");
  out.snb = (out.nb_model - out.nb_default) / out.prevalence;
  return out;
}

double snb(std::span<const double> predictions, std::span<const double> reference, Threshold z) {
  return snb_parts(predictions, reference, z).snb;
}

}  // namespace credence
