// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0
//
// Expected-utility decisions at a risk threshold. With utilities u_ab for
// action a (1 = treat) and outcome b, the utilities enter only through the
// threshold z at which treating and not treating have equal expected utility.

#pragma once

#include <span>

namespace credence {

class Threshold {
 public:
  /// Throws InvalidArgument unless 0 < z < 1.
  explicit Threshold(double z);
  double value() const noexcept { return z_; }

 private:
  double z_;
};

/// Utilities u_ab: a = action (1 treat, 0 no-treat), b = outcome (1 event).
/// Well-ordered when u11 > u01 (treating helps an event) and u00 > u10
/// (treating harms a non-event).
struct Utilities {
  double u00 = 0.0;
  double u01 = 0.0;
  double u10 = 0.0;
  double u11 = 0.0;

  bool well_ordered() const noexcept { return u11 > u01 && u00 > u10; }
  /// z = (u00 - u10) / (u00 - u10 + u11 - u01); throws unless well-ordered.
  Threshold threshold() const;
  /// Expected utility of an action when the event probability is pi.
  double expected(bool treat, double pi) const noexcept;
};

/// NB(pi) = (pi - z) / (1 - z).
double net_benefit(double pi, Threshold z) noexcept;

enum class Decision { NoTreat, Treat };

const char* to_string(Decision d);

/// Treat iff post_mean >= z.
Decision treat_decision(double post_mean, Threshold z) noexcept;

struct SnbParts {
  double nb_model = 0.0;
  double nb_treat_all = 0.0;
  double nb_default = 0.0;
  double prevalence = 0.0;
  double snb = 0.0;
};

/// Standardized incremental net benefit of treating by prediction >= z over
/// the better of treat-all and treat-none, scaled by the mean reference.
/// The reference may be observed labels or true probabilities.
SnbParts snb_parts(std::span<const double> predictions, std::span<const double> reference,
                   Threshold z);
double snb(std::span<const double> predictions, std::span<const double> reference, Threshold z);

}  // namespace credence
