// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Reference values come from independent oracles in
// support.hpp or from published figures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "support.hpp"

#include "credence/decision.hpp"
#include "credence/error.hpp"
#include "credence/predict.hpp"
#include "credence/priors.hpp"
#include "credence/projection.hpp"
#include "credence/sim.hpp"

using namespace credence;
using namespace credence::testing;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

LinearPredictorDist from_interval(double lo, double hi) {
  const double z = 1.959963984540054;
  const double a = std::log(lo / (1 - lo)), b = std::log(hi / (1 - hi));
  return {(a + b) / 2.0, (b - a) / (2.0 * z)};
}

constexpr std::size_t kFlat = 0;
constexpr std::size_t kPlugIn = 0;
constexpr std::size_t kQuadrature = 1;

Outcome quadrature_fidelity() {
  double worst = 0.0, worst_mu = 0.0, worst_sigma = 0.0;
  for (int a = -12; a <= 12; ++a)
    for (int b = 0; b <= 12; ++b) {
      const LinearPredictorDist d{0.5 * a, 0.25 * b};
      const double err = std::abs(posterior_mean_quadrature(d, 30) - oracle_logit_normal_mean(d.mu, d.sigma));
      if (err > worst) worst = err, worst_mu = d.mu, worst_sigma = d.sigma;
    }
  return {worst <= 1e-6, fmt("max abs error %.3g at mu=%.2f sigma=%.2f (tolerance 1e-6)", worst, worst_mu,
                             worst_sigma)};
}

Outcome sam_doe_anchor() {
  const LinearPredictorDist d = from_interval(0.026, 0.084);
  const double pm = posterior_mean_quadrature(d), pe = plug_in(d);
  return {std::abs(pm - 0.049) <= 0.001 && std::abs(pe - 0.047) <= 0.001,
          fmt("PM=%.4f (0.049+-0.001) plug-in=%.4f (0.047+-0.001)", pm, pe)};
}

Outcome mackay_anchor() {
  const LinearPredictorDist d = from_interval(0.030, 0.091);
  const double q = posterior_mean_quadrature(d), m = posterior_mean_mackay(d);
  const double rel = std::abs(m - q) / q;
  return {rel <= 0.02, fmt("relative gap %.2f%% (<= 2%%)", 100 * rel)};
}

Outcome firth_closed_form() {
  double worst = 0.0;
  for (auto [n, k] : {std::pair{10, 1}, {50, 3}, {100, 0}}) {
    Dataset ds;
    ds.x = Matrix(static_cast<std::size_t>(n), 1, 1.0);
    ds.y.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < k; ++i) ds.y[static_cast<std::size_t>(i)] = 1.0;
    ds.w.assign(static_cast<std::size_t>(n), 1.0);
    const double fitted = ref_sigmoid(fit_jeffreys(ds).beta[0]);
    // grid search of the penalised log-likelihood in p, refined on the best cell
    auto objective = [&](double p) {
      return k * std::log(p) + (n - k) * std::log1p(-p) + 0.5 * std::log(n * p * (1 - p));
    };
    double best = 0.0, best_val = -INFINITY;
    for (int g = 1; g < 100000; ++g) {
      const double p = g * 1e-5;
      if (const double v = objective(p); v > best_val) best_val = v, best = p;
    }
    const double oracle = golden_max(objective, best - 1e-5, best + 1e-5, 1e-12);
    worst = std::max({worst, std::abs(fitted - oracle), std::abs(fitted - (k + 0.5) / (n + 1.0))});
  }
  return {worst <= 1e-5, fmt("max deviation %.2g from closed form / grid oracle (tolerance 1e-5)", worst)};
}

Outcome logf_equivalence() {
  double worst = 0.0;
  int fixtures = 0;
  std::uint64_t seed = 5000;
  for (double m : {1.0, 2.0, 5.0})
    for (int rep = 0; rep < (m == 5.0 ? 6 : 7); ++rep) {
      const Dataset ds = random_logistic_dataset(++seed, 80, 3);
      const PackagedModel fit = fit_logf(ds, LogFOptions{m, {}, false});
      const auto oracle = oracle_logf_fit(ds, m, {false, true, true, true});
      for (std::size_t j = 0; j < 4; ++j) worst = std::max(worst, std::abs(fit.beta[j] - oracle[j]));
      ++fixtures;
    }
  return {worst <= 1e-6 && fixtures == 20, fmt("%d fixtures, max coefficient gap %.2g (tolerance 1e-6)",
                                               fixtures, worst)};
}

Outcome ridge_tuning() {
  double worst = 0.0;
  bool psd = true;
  for (std::uint64_t seed = 7000; seed < 7010; ++seed) {
    const Dataset ds = random_logistic_dataset(seed, 100, 4, -0.5, 0.3);
    double best = -8.0, best_val = -INFINITY;
    for (int g = 0; g <= 1600; ++g) {
      const double r = -8.0 + 0.01 * g;
      if (const double v = oracle_ridge_log_marginal(ds, std::exp(r)); v > best_val) best_val = v, best = r;
    }
    const PackagedModel m = fit_bayes_ridge(ds);
    worst = std::max(worst, std::abs(*m.prior.lambda_hat / std::exp(best) - 1.0));
    const auto [std_ds, s] = standardize(ds);
    const RidgeCovariances c = ridge_covariances(std_ds);
    psd = psd && is_positive_semidefinite(subtract(c.corrected, c.uncorrected));
  }
  return {worst <= 0.05 && psd,
          fmt("max relative lambda gap %.2f%% (<= 5%%), corrected-minus-uncorrected PSD: %s", 100 * worst,
              psd ? "yes" : "no")};
}

Outcome jensen_suite() {
  std::size_t rows = 0, violations = 0;
  for (std::uint64_t seed = 9000; seed < 9050; ++seed) {
    const Dataset ds = random_logistic_dataset(seed, 200, 5);
    for (PriorVariant v : kSimulationPriors) {
      PriorSpec spec;
      spec.variant = v;
      const PackagedModel m = fit_model(ds, spec);
      for (const auto& d : linear_predictor_dists(m.beta, m.sigma, ds.x)) {
        const double pm = posterior_mean_quadrature(d, m.quadrature_k), pe = plug_in(d);
        ++rows;
        if ((pm >= pe) != (d.mu <= 0.0)) ++violations;
      }
    }
  }
  return {violations == 0, fmt("%zu of %zu rows violate PM >= PE <=> mu <= 0 (4 priors)", violations, rows)};
}

double median(std::vector<double> v) { return quantile(v, 0.5); }

ScenarioResult run_timed(ScenarioConfig cfg, const char* label) {
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioResult r = run_scenario(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("  (%s scenario: %d replicates in %.0f s)\n", label, cfg.replicates, secs);
  std::fflush(stdout);
  return r;
}

Outcome calibration_tradeoff(const ScenarioResult& r) {
  std::vector<double> slope_pe, slope_pm, oe_pe, oe_pm;
  for (const auto& rep : r.replicates) {
    const auto& pe = rep.reports[kFlat][kPlugIn];
    const auto& pm = rep.reports[kFlat][kQuadrature];
    if (!pe || !pm) continue;
    slope_pe.push_back(std::abs(pe->calibration_slope - 1.0));
    slope_pm.push_back(std::abs(pm->calibration_slope - 1.0));
    oe_pe.push_back(std::abs(pe->oe_ratio - 1.0));
    oe_pm.push_back(std::abs(pm->oe_ratio - 1.0));
  }
  const double s_pe = median(slope_pe), s_pm = median(slope_pm), o_pe = median(oe_pe), o_pm = median(oe_pm);
  return {s_pm < s_pe && o_pm > o_pe,
          fmt("median |slope-1| PM %.4f vs PE %.4f; median |O/E-1| PM %.4f vs PE %.4f (%zu fits)", s_pm, s_pe,
              o_pm, o_pe, slope_pe.size())};
}

Outcome snb_direction(const ScenarioResult& r) {
  int wins = 0;
  std::string detail;
  for (std::size_t k = 0; k < 4; ++k) {
    const double pm = r.find(kSimulationPriors[k], Estimator::Quadrature, "snb", "q25").center;
    const double pe = r.find(kSimulationPriors[k], Estimator::PlugIn, "snb", "q25").center;
    if (pm >= pe) ++wins;
    detail += fmt("%s PM %.4f vs PE %.4f; ", to_string(kSimulationPriors[k]), pm, pe);
  }
  return {wins >= 3, detail + fmt("%d of 4 priors favour PM (need 3)", wins)};
}

Outcome coverage(const ScenarioResult& r) {
  bool ok = true;
  std::string detail;
  for (std::size_t k = 0; k < 4; ++k) {
    const double c = r.find(kSimulationPriors[k], Estimator::Quadrature, "coverage").center;
    const bool ridge = kSimulationPriors[k] == PriorVariant::GaussianRidge;
    const double lo = ridge ? 0.90 : 0.93, hi = ridge ? 0.96 : 0.97;
    ok = ok && c >= lo && c <= hi;
    detail += fmt("%s %.3f [%.2f,%.2f]; ", to_string(kSimulationPriors[k]), c, lo, hi);
  }
  return {ok, detail};
}

Outcome cdf_calibration(const ScenarioResult& r) {
  bool ok = true;
  std::string detail;
  for (std::size_t k = 0; k < 4; ++k) {
    const double c = r.find(kSimulationPriors[k], Estimator::Quadrature, "cdf_0.5").center;
    ok = ok && std::abs(c - 0.5) <= 0.08;
    detail += fmt("%s %.3f; ", to_string(kSimulationPriors[k]), c);
  }
  return {ok, detail + "band 0.5+-0.08"};
}

Outcome decision_oracle() {
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> u(-10.0, 10.0), gap(1e-3, 10.0), pm(0.0, 1.0);
  int disagreements = 0;
  for (int i = 0; i < 10000; ++i) {
    Utilities ut;
    ut.u01 = u(rng);
    ut.u11 = ut.u01 + gap(rng);
    ut.u10 = u(rng);
    ut.u00 = ut.u10 + gap(rng);
    const double pi = pm(rng);
    const double treat = pi * ut.u11 + (1 - pi) * ut.u10;
    const double none = pi * ut.u01 + (1 - pi) * ut.u00;
    const Decision best = treat >= none ? Decision::Treat : Decision::NoTreat;
    if (treat_decision(pi, ut.threshold()) != best) ++disagreements;
  }
  return {disagreements == 0, fmt("%d disagreements in 10000 tuples", disagreements)};
}

Outcome self_projection() {
  ScenarioConfig cfg;
  double worst_gap = -INFINITY, worst_beta = 0.0;
  int ok = 0;
  for (std::uint64_t r = 0; r < 50; ++r) {
    const std::uint64_t seed = split_seed(31337, r);
    const Population pop = gen_population(cfg, seed);
    const DevelopmentSample dev = draw_development(cfg, pop, seed);
    std::vector<TermSpec> terms;
    for (int j = 0; j < 5; ++j) terms.push_back({"x" + std::to_string(j + 1), TermKind::Continuous, {}});
    const Dataset ds = make_dataset(terms, dev.x, dev.y);
    PackagedModel m = fit_flat(ds);
    const ProjectedModel p = self_project(m, ds);
    double kl_plug = 0.0;
    for (const auto& d : linear_predictor_dists(m.beta, m.sigma, ds.x))
      kl_plug += kl_bernoulli(posterior_mean_quadrature(d, m.quadrature_k), plug_in(d));
    kl_plug /= static_cast<double>(ds.rows());
    worst_gap = std::max(worst_gap, p.mean_residual_kl - kl_plug);
    if (p.mean_residual_kl <= kl_plug) ++ok;

    m.sigma = Matrix(m.dim(), m.dim());
    const ProjectedModel z = self_project(m, ds);
    for (std::size_t j = 0; j < m.dim(); ++j) worst_beta = std::max(worst_beta, std::abs(z.beta[j] - m.beta[j]));
  }
  return {ok == 50 && worst_beta <= 1e-6,
          fmt("%d/50 replicates with KL(projection) <= KL(plug-in) (max excess %.3g); zero-covariance recovery "
              "error %.2g (<= 1e-6)",
              ok, worst_gap, worst_beta)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  };

  report("quadrature-fidelity", quadrature_fidelity);
  report("anchor-flat-prior", sam_doe_anchor);
  report("anchor-mackay", mackay_anchor);
  report("firth-closed-form", firth_closed_form);
  report("logf-equivalence", logf_equivalence);
  report("ridge-tuning", ridge_tuning);
  report("jensen-shrinkage", jensen_suite);

  ScenarioConfig small;
  small.name = "epv5";
  small.epv = 5.0;
  small.replicates = 200;
  small.run_projection = false;
  const ScenarioResult epv5 = run_timed(small, "EPV=5");
  report("calibration-tradeoff", [&] { return calibration_tradeoff(epv5); });

  ScenarioConfig cover = small;
  cover.name = "epv10";
  cover.epv = 10.0;
  const ScenarioResult epv10 = run_timed(cover, "EPV=10");
  report("coverage", [&] { return coverage(epv10); });
  report("posterior-cdf-calibration", [&] { return cdf_calibration(epv10); });

  report("decision-oracle", decision_oracle);
  report("snb-direction", [&] { return snb_direction(epv5); });
  report("self-projection", self_projection);

  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
