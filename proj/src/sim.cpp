// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include "credence/sim.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "credence/decision.hpp"
#include "credence/error.hpp"
#include "credence/glm.hpp"
#include "credence/normal.hpp"
#include "credence/predict.hpp"
#include "credence/projection.hpp"
#include "credence/sobol.hpp"

namespace credence {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Uniform in (0,1) with 53 random bits, independent of the standard
/// library's distribution implementations.
double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

double standard_normal(std::mt19937_64& rng) { return std_normal_quantile(open_uniform(rng)); }

double laplace(std::mt19937_64& rng, double scale) {
  const double u = open_uniform(rng) - 0.5;
  return u < 0.0 ? scale * std::log1p(2.0 * u) : -scale * std::log1p(-2.0 * u);
}

std::vector<TermSpec> predictor_terms(const std::vector<bool>& binary, int count) {
  std::vector<TermSpec> terms;
  for (int j = 0; j < count; ++j)
    terms.push_back(TermSpec{"x" + std::to_string(j + 1),
                             binary[j] ? TermKind::Binary : TermKind::Continuous, {}});
  return terms;
}

/// First `cols` columns of x.
Matrix leading_columns(const Matrix& x, std::size_t cols) {
  Matrix out(x.rows(), cols);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < cols; ++j) out(i, j) = x(i, j);
  return out;
}

double true_eta(const Population& pop, std::span<const double> row) {
  double eta = 0.0;
  for (std::size_t j = 0; j < pop.slopes.size(); ++j) eta += pop.slopes[j] * row[j];
  return eta;
}

template <class F>
double or_nan(F&& f) {
  try {
    return f();
  } catch (const Error&) {
    return kNaN;
  }
}

PriorSpec prior_spec(PriorVariant v, double logf_m) {
  PriorSpec spec;
  spec.variant = v;
  spec.logf.m = logf_m;
  return spec;
}

/// Everything needed to score one fitted model on an evaluation set.
struct EvaluationTarget {
  const Matrix* design = nullptr;         // with intercept
  std::span<const double> reference;      // labels or true probabilities
  std::span<const double> interval_truth; // pseudo-true probabilities; empty = skip
  std::vector<Threshold> thresholds;
};

void score_model(const PackagedModel& model, const Dataset& case_mix, const EvaluationTarget& t,
                 bool do_projection, ReplicateResult& rep, std::size_t prior_index) {
  const auto dists = linear_predictor_dists(model.beta, model.sigma, *t.design);
  const std::size_t n = dists.size();
  std::array<Vector, 4> preds;
  for (auto& p : preds) p.resize(n);
  bool jensen = true;
  for (std::size_t i = 0; i < n; ++i) {
    preds[0][i] = plug_in(dists[i]);
    preds[1][i] = posterior_mean_quadrature(dists[i], model.quadrature_k);
    preds[2][i] = posterior_mean_mackay(dists[i]);
    if ((preds[1][i] >= preds[0][i]) != (dists[i].mu <= 0.0)) jensen = false;
  }
  rep.jensen_ok[prior_index] = jensen;
  bool projection_ok = false;
  if (do_projection) {
    try {
      const ProjectedModel proj = self_project(model, case_mix);
      for (std::size_t i = 0; i < n; ++i) preds[3][i] = proj.predict_design(t.design->row(i));
      projection_ok = true;
    } catch (const Error&) {
    }
  }

  std::vector<std::pair<double, double>> cris;
  std::vector<double> cdf(3, kNaN);
  double coverage = kNaN;
  if (!t.interval_truth.empty()) {
    cris.reserve(n);
    for (const auto& d : dists) cris.push_back(credible_interval(d, 0.95));
    coverage = cri_coverage(cris, t.interval_truth);
    cdf = posterior_cdf_calibration(dists, t.interval_truth);
  }

  for (std::size_t e = 0; e < kEstimators.size(); ++e) {
    if (kEstimators[e] == Estimator::Projection && !projection_ok) continue;
    const Vector& pi = preds[e];
    MetricReport r;
    r.mse = or_nan([&] { return mse_vs_truth(pi, t.reference); });
    r.c_statistic = or_nan([&] { return c_statistic(pi, t.reference); });
    r.oe_ratio = or_nan([&] { return oe_ratio(t.reference, pi); });
    r.calibration_intercept = kNaN;
    r.calibration_slope = kNaN;
    try {
      std::tie(r.calibration_intercept, r.calibration_slope) =
          calibration_intercept_slope(t.reference, pi);
    } catch (const Error&) {
    }
    for (const Threshold& z : t.thresholds)
      r.snb.push_back(or_nan([&] { return snb(pi, t.reference, z); }));
    const bool posterior_summary = kEstimators[e] != Estimator::Projection;
    r.coverage = posterior_summary ? coverage : kNaN;
    for (std::size_t k = 0; k < 3; ++k) r.cdf_hat[k] = posterior_summary ? cdf[k] : kNaN;
    rep.reports[prior_index][e] = std::move(r);
  }
}

ReplicateResult run_replicate(const ScenarioConfig& cfg, std::uint64_t seed) {
  ReplicateResult rep;
  rep.seed = seed;
  const Population pop = gen_population(cfg, seed);
  rep.rho = pop.rho;
  const DevelopmentSample dev = draw_development(cfg, pop, seed);
  for (double y : dev.y) rep.development_events += y;

  const auto cand = static_cast<std::size_t>(cfg.candidate_predictors);
  const std::vector<TermSpec> terms = predictor_terms(pop.binary, cfg.candidate_predictors);
  const Dataset dev_ds = make_dataset(terms, leading_columns(dev.x, cand), dev.y);
  const Dataset pop_ds = make_dataset(terms, leading_columns(pop.x, cand), pop.p);

  // KL-closest candidate-family probabilities: the target of interval coverage.
  const Vector pseudo_beta = pseudo_true_fit(pop_ds);
  const Vector pseudo_eta = multiply(pop_ds.x, pseudo_beta);
  Vector pseudo_p(pseudo_eta.size());
  for (std::size_t i = 0; i < pseudo_p.size(); ++i) pseudo_p[i] = sigmoid(pseudo_eta[i]);

  EvaluationTarget target;
  target.design = &pop_ds.x;
  target.reference = pop.p;
  target.interval_truth = pseudo_p;
  for (double q : cfg.threshold_quantiles) {
    const double z = quantile(pop.p, q);
    rep.thresholds.push_back(z);
    target.thresholds.emplace_back(z);
  }

  for (std::size_t k = 0; k < kSimulationPriors.size(); ++k) {
    PackagedModel model;
    try {
      model = fit_model(dev_ds, prior_spec(kSimulationPriors[k], cfg.logf_m));
    } catch (const Error& e) {
      rep.failure[k] = e.what();
      continue;
    }
    score_model(model, dev_ds, target, cfg.run_projection, rep, k);
  }
  return rep;
}

template <class Task>
std::vector<ReplicateResult> run_parallel(int replicates, int threads, Task task) {
  std::vector<ReplicateResult> out(static_cast<std::size_t>(replicates));
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(replicates, 1)));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (int r = next++; r < replicates; r = next++) {
      try {
        out[static_cast<std::size_t>(r)] = task(r);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

std::string percent_label(double q) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "q%g", q * 100.0);
  return buf;
}

std::string plain_label(double z) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", z);
  return buf;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void config_error(std::size_t line, const std::string& msg) {
  fail(ErrorCode::ConfigError, "config line " + std::to_string(line) + ": " + msg);
}

double parse_real(const std::string& text, std::size_t line, const std::string& key) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v))
    config_error(line, "'" + key + "' expects a number, got '" + text + "'");
  return v;
}

long long parse_int(const std::string& text, std::size_t line, const std::string& key) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    config_error(line, "'" + key + "' expects an integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& text, std::size_t line, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  config_error(line, "'" + key + "' expects true or false, got '" + text + "'");
}

}  // namespace

std::uint64_t split_seed(std::uint64_t master, std::uint64_t counter) noexcept {
  std::uint64_t z = master + (counter + 1) * 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::size_t ScenarioConfig::development_n() const {
  return static_cast<std::size_t>(std::ceil(epv * candidate_predictors / prevalence - 1e-9));
}

int ScenarioConfig::predictor_columns() const noexcept {
  return std::max(true_predictors, candidate_predictors);
}

void ScenarioConfig::validate() const {
  if (true_predictors < 0 || candidate_predictors < 1)
    fail(ErrorCode::ConfigError, "predictor counts must be >= 0 (true) and >= 1 (candidate)");
  if (predictor_columns() + 1 > static_cast<int>(SobolSequence::kMaxDimension))
    fail(ErrorCode::ConfigError, "at most 63 predictor columns are supported");
  if (!(prevalence > 0.0 && prevalence < 1.0))
    fail(ErrorCode::ConfigError, "prevalence must lie in (0,1)");
  if (!(epv > 0.0)) fail(ErrorCode::ConfigError, "EPV must be positive");
  if (replicates < 1) fail(ErrorCode::ConfigError, "replicates must be >= 1");
  if (population_size < development_n())
    fail(ErrorCode::ConfigError, "population size must be at least the development sample size");
  for (double q : threshold_quantiles)
    if (!(q > 0.0 && q < 1.0)) fail(ErrorCode::ConfigError, "threshold quantiles must lie in (0,1)");
  if (!(logf_m > 0.0)) fail(ErrorCode::ConfigError, "logf_m must be positive");
  if (fixed_rho && !(*fixed_rho >= 0.0 && *fixed_rho < 1.0))
    fail(ErrorCode::ConfigError, "rho must lie in [0,1)");
  if (!(binary_probability >= 0.0 && binary_probability <= 1.0))
    fail(ErrorCode::ConfigError, "binary_probability must lie in [0,1]");
}

const char* to_string(Estimator e) {
  switch (e) {
    case Estimator::PlugIn: return "plug_in";
    case Estimator::Quadrature: return "pm_quadrature";
    case Estimator::MacKay: return "pm_mackay";
    case Estimator::Projection: return "pm_projection";
  }
  return "plug_in";
}

double solve_intercept(std::span<const double> eta, double target) {
  if (!(target > 0.0 && target < 1.0))
    fail(ErrorCode::DomainError, "target prevalence must lie in (0,1)");
  if (eta.empty()) fail(ErrorCode::EmptyDataset, "no linear predictors");
  auto mean_at = [&](double b0) {
    double s = 0.0;
    for (double e : eta) s += sigmoid(b0 + e);
    return s / static_cast<double>(eta.size());
  };
  double lo = -40.0, hi = 40.0;
  if (!(mean_at(lo) < target && mean_at(hi) > target))
    fail(ErrorCode::NonConvergence, "intercept bracket [-40, 40] does not contain the target");
  double mid = 0.0;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double m = mean_at(mid);
    if (std::abs(m - target) <= 1e-9 || hi - lo < 1e-13) break;
    (m < target ? lo : hi) = mid;
  }
  return mid;
}

Population gen_population(const ScenarioConfig& cfg, std::uint64_t replicate_seed) {
  cfg.validate();
  const auto d = static_cast<std::size_t>(cfg.predictor_columns());
  std::mt19937_64 rng(split_seed(replicate_seed, 0));

  Population pop;
  static constexpr std::array<double, 4> kRhoLevels{0.0, 0.25, 0.5, 0.75};
  pop.rho = cfg.fixed_rho ? *cfg.fixed_rho : kRhoLevels[rng() % kRhoLevels.size()];
  pop.binary.resize(d);
  for (std::size_t j = 0; j < d; ++j) pop.binary[j] = open_uniform(rng) < cfg.binary_probability;
  pop.slopes.resize(static_cast<std::size_t>(cfg.true_predictors));
  for (double& b : pop.slopes) b = laplace(rng, kCoefficientSd / std::sqrt(2.0));

  std::vector<std::uint32_t> shift(d + 1);
  for (auto& s : shift) s = static_cast<std::uint32_t>(rng() >> 32);
  SobolSequence sobol(d + 1, shift);

  const std::size_t n = cfg.population_size;
  const double a = std::sqrt(pop.rho), b = std::sqrt(1.0 - pop.rho);
  pop.x = Matrix(n, d);
  std::vector<double> u(d + 1);
  Vector eta(n);
  for (std::size_t i = 0; i < n; ++i) {
    sobol.next(u);
    // centre of the 2^-32 cell keeps every coordinate strictly inside (0,1)
    const double factor = std_normal_quantile(u[0] + 0x1p-33);
    for (std::size_t j = 0; j < d; ++j) {
      const double z = a * factor + b * std_normal_quantile(u[j + 1] + 0x1p-33);
      pop.x(i, j) = pop.binary[j] ? (z > 0.0 ? 1.0 : 0.0) : z;
    }
    eta[i] = true_eta(pop, pop.x.row(i));
  }
  pop.intercept = solve_intercept(eta, cfg.prevalence);
  pop.p.resize(n);
  for (std::size_t i = 0; i < n; ++i) pop.p[i] = sigmoid(pop.intercept + eta[i]);
  return pop;
}

DevelopmentSample draw_development(const ScenarioConfig& cfg, const Population& pop,
                                   std::uint64_t replicate_seed) {
  const std::size_t n = cfg.development_n();
  const std::size_t d = pop.x.cols();
  std::mt19937_64 rng(split_seed(replicate_seed, 1));
  const double a = std::sqrt(pop.rho), b = std::sqrt(1.0 - pop.rho);
  DevelopmentSample dev;
  dev.x = Matrix(n, d);
  dev.p.resize(n);
  dev.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double factor = standard_normal(rng);
    for (std::size_t j = 0; j < d; ++j) {
      const double z = a * factor + b * standard_normal(rng);
      dev.x(i, j) = pop.binary[j] ? (z > 0.0 ? 1.0 : 0.0) : z;
    }
    dev.p[i] = sigmoid(pop.intercept + true_eta(pop, dev.x.row(i)));
  }
  for (std::size_t i = 0; i < n; ++i) dev.y[i] = open_uniform(rng) < dev.p[i] ? 1.0 : 0.0;
  return dev;
}

const AggregateRow& ScenarioResult::find(PriorVariant prior, Estimator est,
                                         std::string_view statistic,
                                         std::string_view threshold) const {
  for (const auto& r : rows)
    if (r.prior == to_string(prior) && r.estimator == to_string(est) && r.statistic == statistic &&
        r.threshold == threshold)
      return r;
  fail(ErrorCode::InvalidArgument, "no aggregate row for " + std::string(statistic));
}

std::vector<AggregateRow> aggregate(const std::vector<ReplicateResult>& reps,
                                    const std::vector<std::string>& threshold_labels,
                                    bool include_projection) {
  std::vector<AggregateRow> rows;
  for (std::size_t k = 0; k < kSimulationPriors.size(); ++k) {
    for (std::size_t e = 0; e < kEstimators.size(); ++e) {
      if (kEstimators[e] == Estimator::Projection && !include_projection) continue;
      auto collect = [&](auto getter) {
        std::vector<double> v;
        for (const auto& rep : reps)
          if (rep.reports[k][e]) v.push_back(getter(*rep.reports[k][e]));
        return v;
      };
      auto add_mean = [&](const std::string& stat, const std::string& thr, const Vector& v) {
        const MeanSd s = mean_sd(v);
        rows.push_back({to_string(kSimulationPriors[k]), to_string(kEstimators[e]), stat, thr,
                        "mean_sd", s.count, s.mean, s.sd, kNaN, kNaN});
      };
      auto add_median = [&](const std::string& stat, const Vector& v) {
        const MedianIqr s = median_iqr(v);
        rows.push_back({to_string(kSimulationPriors[k]), to_string(kEstimators[e]), stat, "",
                        "median_iqr", s.count, s.median, kNaN, s.q1, s.q3});
      };
      add_mean("mse", "", collect([](const MetricReport& r) { return r.mse; }));
      add_mean("c_statistic", "", collect([](const MetricReport& r) { return r.c_statistic; }));
      add_median("oe_ratio", collect([](const MetricReport& r) { return r.oe_ratio; }));
      add_mean("calibration_intercept", "",
               collect([](const MetricReport& r) { return r.calibration_intercept; }));
      add_median("calibration_slope", collect([](const MetricReport& r) { return r.calibration_slope; }));
      for (std::size_t t = 0; t < threshold_labels.size(); ++t)
        add_mean("snb", threshold_labels[t], collect([t](const MetricReport& r) {
                   return t < r.snb.size() ? r.snb[t] : kNaN;
                 }));
      if (kEstimators[e] != Estimator::Projection) {
        add_mean("coverage", "", collect([](const MetricReport& r) { return r.coverage; }));
        static constexpr std::array<const char*, 3> kCdfNames{"cdf_0.1", "cdf_0.5", "cdf_0.9"};
        for (std::size_t c = 0; c < 3; ++c)
          add_mean(kCdfNames[c], "", collect([c](const MetricReport& r) { return r.cdf_hat[c]; }));
      }
    }
  }
  return rows;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  ScenarioResult result;
  result.config = cfg;
  result.replicates = run_parallel(cfg.replicates, cfg.threads, [&](int r) {
    return run_replicate(cfg, split_seed(cfg.seed, static_cast<std::uint64_t>(r)));
  });
  for (const auto& rep : result.replicates)
    for (std::size_t k = 0; k < 4; ++k)
      if (!rep.failure[k].empty()) ++result.fit_failures[k];
  std::vector<std::string> labels;
  for (double q : cfg.threshold_quantiles) labels.push_back(percent_label(q));
  result.rows = aggregate(result.replicates, labels, cfg.run_projection);
  return result;
}

void write_results_csv(std::ostream& out, const std::string& scenario,
                       const std::vector<AggregateRow>& rows, bool header) {
  if (header) out << kResultsCsvHeader << '\n';
  auto num = [](double v) {
    if (!std::isfinite(v)) return std::string("NA");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::string(buf);
  };
  for (const auto& r : rows)
    out << scenario << ',' << r.prior << ',' << r.estimator << ',' << r.statistic << ','
        << r.threshold << ',' << r.summary << ',' << r.count << ',' << num(r.center) << ','
        << num(r.sd) << ',' << num(r.q1) << ',' << num(r.q3) << '\n';
}

std::vector<ScenarioConfig> parse_scenario_config(std::string_view text) {
  ScenarioConfig base;
  std::vector<std::string> true_list{"5"}, cand_list{"5"}, prev_list{"0.15"}, epv_list{"10"};
  std::size_t true_line = 0, cand_line = 0, prev_line = 0, epv_line = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error(line_no, "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (value.empty()) config_error(line_no, "missing value for '" + key + "'");
    if (key == "name") base.name = value;
    else if (key == "true_predictors") { true_list = split_list(value); true_line = line_no; }
    else if (key == "candidate_predictors") { cand_list = split_list(value); cand_line = line_no; }
    else if (key == "prevalence") { prev_list = split_list(value); prev_line = line_no; }
    else if (key == "epv") { epv_list = split_list(value); epv_line = line_no; }
    else if (key == "replicates") base.replicates = static_cast<int>(parse_int(value, line_no, key));
    else if (key == "population_size") {
      const long long v = parse_int(value, line_no, key);
      if (v < 1) config_error(line_no, "population_size must be positive");
      base.population_size = static_cast<std::size_t>(v);
    } else if (key == "seed") {
      const long long v = parse_int(value, line_no, key);
      if (v < 0) config_error(line_no, "seed must be non-negative");
      base.seed = static_cast<std::uint64_t>(v);
    } else if (key == "threshold_quantiles") {
      base.threshold_quantiles.clear();
      for (const auto& q : split_list(value)) base.threshold_quantiles.push_back(parse_real(q, line_no, key));
    } else if (key == "logf_m") base.logf_m = parse_real(value, line_no, key);
    else if (key == "run_projection") base.run_projection = parse_bool(value, line_no, key);
    else if (key == "threads") base.threads = static_cast<int>(parse_int(value, line_no, key));
    else if (key == "rho") base.fixed_rho = parse_real(value, line_no, key);
    else if (key == "binary_probability") base.binary_probability = parse_real(value, line_no, key);
    else config_error(line_no, "unknown key '" + key + "'");
  }

  std::vector<ScenarioConfig> grid;
  for (const auto& t : true_list)
    for (const auto& c : cand_list)
      for (const auto& p : prev_list)
        for (const auto& e : epv_list) {
          ScenarioConfig cfg = base;
          cfg.true_predictors = static_cast<int>(parse_int(t, true_line, "true_predictors"));
          cfg.candidate_predictors = static_cast<int>(parse_int(c, cand_line, "candidate_predictors"));
          cfg.prevalence = parse_real(p, prev_line, "prevalence");
          cfg.epv = parse_real(e, epv_line, "epv");
          if (grid.size() > 0 || true_list.size() * cand_list.size() * prev_list.size() * epv_list.size() > 1)
            cfg.name = base.name + "_t" + t + "_c" + c + "_p" + p + "_e" + e;
          cfg.validate();
          grid.push_back(std::move(cfg));
        }
  return grid;
}

std::vector<ScenarioConfig> load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario_config(text.str());
}

namespace {

Dataset subset_rows(const Dataset& ds, std::span<const std::size_t> rows) {
  Dataset out;
  out.terms = ds.terms;
  out.x = Matrix(rows.size(), ds.x.cols());
  out.y.resize(rows.size());
  out.w.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = ds.x.row(rows[i]);
    for (std::size_t j = 0; j < src.size(); ++j) out.x(i, j) = src[j];
    out.y[i] = ds.y[rows[i]];
    out.w[i] = ds.w[rows[i]];
  }
  return out;
}

}  // namespace

SplitSampleResult split_sample_harness(const Dataset& ds, const SplitSampleConfig& cfg) {
  ds.validate();
  const std::size_t n = ds.rows();
  if (cfg.train_n < 2 || cfg.train_n + 2 > n)
    fail(ErrorCode::InsufficientRows, "split needs at least two training and two held-out rows (have " +
                                          std::to_string(n) + " rows, train n " +
                                          std::to_string(cfg.train_n) + ")");
  if (cfg.replicates < 1) fail(ErrorCode::ConfigError, "replicates must be >= 1");
  std::vector<Threshold> thresholds;
  for (double z : cfg.thresholds) thresholds.emplace_back(z);

  SplitSampleResult result;
  result.in_sample_oe.assign(static_cast<std::size_t>(cfg.replicates), kNaN);
  result.replicates = run_parallel(cfg.replicates, 1, [&](int r) {
    const std::uint64_t seed = split_seed(cfg.seed, static_cast<std::uint64_t>(r));
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng() % (i + 1)]);
    const std::span<const std::size_t> all(perm);
    const Dataset train = subset_rows(ds, all.first(cfg.train_n));
    const Dataset test = subset_rows(ds, all.subspan(cfg.train_n));

    ReplicateResult rep;
    rep.seed = seed;
    for (double y : train.y) rep.development_events += y;
    rep.thresholds = cfg.thresholds;
    EvaluationTarget target;
    target.design = &test.x;
    target.reference = test.y;
    target.thresholds = thresholds;
    for (std::size_t k = 0; k < kSimulationPriors.size(); ++k) {
      PackagedModel model;
      try {
        model = fit_model(train, prior_spec(kSimulationPriors[k], cfg.logf_m));
      } catch (const Error& e) {
        rep.failure[k] = e.what();
        continue;
      }
      if (kSimulationPriors[k] == PriorVariant::Flat) {
        const Vector eta = multiply(train.x, model.beta);
        Vector pe(eta.size());
        for (std::size_t i = 0; i < eta.size(); ++i) pe[i] = sigmoid(eta[i]);
        result.in_sample_oe[static_cast<std::size_t>(r)] = or_nan([&] { return oe_ratio(train.y, pe); });
      }
      score_model(model, train, target, true, rep, k);
    }
    return rep;
  });
  for (const auto& rep : result.replicates)
    for (std::size_t k = 0; k < 4; ++k)
      if (!rep.failure[k].empty()) ++result.fit_failures[k];
  std::vector<std::string> labels;
  for (double z : cfg.thresholds) labels.push_back(plain_label(z));
  result.rows = aggregate(result.replicates, labels, true);
  return result;
}

}  // namespace credence
