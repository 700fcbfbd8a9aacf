// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0
//
// Simulation harness: synthetic populations with known event probabilities,
// development samples at a target events-per-variable, the four priors, and
// truth-referenced evaluation of plug-in and posterior-mean predictions.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "credence/linalg.hpp"
#include "credence/metrics.hpp"
#include "credence/priors.hpp"

namespace credence {

/// Counter-based seed splitter (SplitMix64 finalizer of seed + k * golden gamma).
std::uint64_t split_seed(std::uint64_t master, std::uint64_t counter) noexcept;

struct ScenarioConfig {
  std::string name = "scenario";
  int true_predictors = 5;
  int candidate_predictors = 5;
  double prevalence = 0.15;
  double epv = 10.0;
  int replicates = 200;
  std::size_t population_size = 10000;
  std::uint64_t seed = 20260101;
  /// Relative thresholds: quantiles of the true probabilities.
  std::vector<double> threshold_quantiles{0.25, 0.50, 0.75};
  double logf_m = 2.0;
  bool run_projection = true;
  int threads = 0;  // 0 = hardware concurrency
  /// Generation knobs; defaults follow the documented protocol.
  std::optional<double> fixed_rho;
  double binary_probability = 0.5;

  /// ceil(EPV * candidate / prevalence)
  std::size_t development_n() const;
  /// Number of simulated predictor columns: max(true, candidate).
  int predictor_columns() const noexcept;
  void validate() const;
};

struct Population {
  Matrix x;                  // n x d predictors, no intercept
  std::vector<bool> binary;  // per column
  double rho = 0.0;
  Vector slopes;             // true coefficients on the first true_predictors columns
  double intercept = 0.0;
  Vector p;                  // true probabilities
};

/// Laplace(0, b) coefficients with b = 0.5 / sqrt(2) (standard deviation 0.5).
inline constexpr double kCoefficientSd = 0.5;

Population gen_population(const ScenarioConfig& cfg, std::uint64_t replicate_seed);

/// Development sample: fresh pseudo-random rows from the population's
/// generating law, outcomes drawn from the true probabilities.
struct DevelopmentSample {
  Matrix x;
  Vector p;
  Vector y;
};
DevelopmentSample draw_development(const ScenarioConfig& cfg, const Population& pop,
                                   std::uint64_t replicate_seed);

/// Intercept b0 with mean(sigmoid(b0 + eta_i)) within 1e-6 of target
/// (bisection on [-40, 40]).
double solve_intercept(std::span<const double> eta, double target);

enum class Estimator { PlugIn, Quadrature, MacKay, Projection };
inline constexpr std::array<Estimator, 4> kEstimators{Estimator::PlugIn, Estimator::Quadrature,
                                                      Estimator::MacKay, Estimator::Projection};
inline constexpr std::array<PriorVariant, 4> kSimulationPriors{
    PriorVariant::Flat, PriorVariant::Jeffreys, PriorVariant::LogF, PriorVariant::GaussianRidge};
const char* to_string(Estimator e);

struct ReplicateResult {
  std::uint64_t seed = 0;
  double rho = 0.0;
  double development_events = 0.0;
  std::vector<double> thresholds;
  /// [prior][estimator]; empty when the fit (or projection) failed.
  std::array<std::array<std::optional<MetricReport>, 4>, 4> reports;
  /// [prior]: per-row PM >= PE agreement with mu <= 0 on the population
  std::array<bool, 4> jensen_ok{};
  std::array<std::string, 4> failure;  // error text per prior, empty if fitted
};

struct AggregateRow {
  std::string prior;
  std::string estimator;
  std::string statistic;
  std::string threshold;  // "" for threshold-free statistics
  std::string summary;    // "mean_sd" or "median_iqr"
  std::size_t count = 0;
  double center = 0.0;
  double sd = 0.0;   // NaN for median_iqr
  double q1 = 0.0;   // NaN for mean_sd
  double q3 = 0.0;
};

struct ScenarioResult {
  ScenarioConfig config;
  std::vector<ReplicateResult> replicates;
  std::array<int, 4> fit_failures{};  // per prior
  std::vector<AggregateRow> rows;

  /// Looks up an aggregate row; throws InvalidArgument if absent.
  const AggregateRow& find(PriorVariant prior, Estimator est, std::string_view statistic,
                           std::string_view threshold = "") const;
};

ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Mean ± SD, except O/E and calibration slope (median + IQR).
std::vector<AggregateRow> aggregate(const std::vector<ReplicateResult>& reps,
                                    const std::vector<std::string>& threshold_labels,
                                    bool include_projection);

inline constexpr const char* kResultsCsvHeader =
    "scenario,prior,estimator,statistic,threshold,summary,count,center,sd,q1,q3";
void write_results_csv(std::ostream& out, const std::string& scenario,
                       const std::vector<AggregateRow>& rows, bool header = true);

/// Key-value config ("key = value", '#' comments). Comma lists on
/// true_predictors, candidate_predictors, prevalence and epv expand to the
/// Cartesian grid of scenarios.
std::vector<ScenarioConfig> parse_scenario_config(std::string_view text);
std::vector<ScenarioConfig> load_scenario_config(const std::string& path);

struct SplitSampleConfig {
  std::size_t train_n = 0;
  int replicates = 100;
  std::uint64_t seed = 20260101;
  std::vector<double> thresholds{0.02, 0.05, 0.10};
  double logf_m = 2.0;
};

struct SplitSampleResult {
  std::vector<ReplicateResult> replicates;
  Vector in_sample_oe;  // flat-prior plug-in O/E on each training split
  std::array<int, 4> fit_failures{};
  std::vector<AggregateRow> rows;
};

/// Repeated random train/test splits of an external dataset; metrics against
/// held-out labels. Requires at least two held-out rows.
SplitSampleResult split_sample_harness(const Dataset& ds, const SplitSampleConfig& cfg);

}  // namespace credence
