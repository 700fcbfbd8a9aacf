// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include "doctest.h"

#include "credence/decision.hpp"
#include "credence/error.hpp"

using namespace credence;

TEST_CASE("threshold domain") {
  CHECK_THROWS_AS(Threshold(0.0), Error);
  CHECK_THROWS_AS(Threshold(1.0), Error);
  CHECK_THROWS_AS(Threshold(NAN), Error);
  CHECK(Threshold(0.05).value() == 0.05);
}

TEST_CASE("net benefit") {
  CHECK(net_benefit(0.05, Threshold(0.05)) == 0.0);
  CHECK(net_benefit(0.1, Threshold(0.05)) == doctest::Approx(0.052632).epsilon(1e-5));
  CHECK(net_benefit(0.0, Threshold(0.1)) == doctest::Approx(-1.0 / 9.0));
  CHECK(net_benefit(0.3, Threshold(1e-9)) == doctest::Approx(0.3).epsilon(1e-8));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  for (int i = 0; i < 1000; ++i) {
    const Threshold z(0.01 + 0.98 * u(rng));
    const double p1 = u(rng), p2 = u(rng), a = u(rng);
    CHECK(net_benefit(a * p1 + (1 - a) * p2, z) ==
          doctest::Approx(a * net_benefit(p1, z) + (1 - a) * net_benefit(p2, z)).epsilon(1e-12));
  }
}

TEST_CASE("treat decision uses >=") {
  CHECK(treat_decision(0.049, Threshold(0.05)) == Decision::NoTreat);
  CHECK(treat_decision(0.051, Threshold(0.05)) == Decision::Treat);
  CHECK(treat_decision(0.05, Threshold(0.05)) == Decision::Treat);
  CHECK(std::string(to_string(Decision::NoTreat)) == "no-treat");
}

TEST_CASE("decision agrees with the expected-utility enumeration") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-10.0, 10.0), gap(0.01, 5.0), pm(0.0, 1.0);
  int disagreements = 0;
  for (int i = 0; i < 10000; ++i) {
    Utilities ut;
    ut.u01 = u(rng);
    ut.u11 = ut.u01 + gap(rng);
    ut.u10 = u(rng);
    ut.u00 = ut.u10 + gap(rng);
    const Threshold z = ut.threshold();
    const double pi = pm(rng);
    const double treat = ut.expected(true, pi), none = ut.expected(false, pi);
    // ties at numerical equality are excluded: they are decided by the >= rule
    if (std::abs(treat - none) < 1e-12) continue;
    const Decision best = treat > none ? Decision::Treat : Decision::NoTreat;
    if (treat_decision(pi, z) != best) ++disagreements;
  }
  CHECK(disagreements == 0);
  CHECK_THROWS_AS((Utilities{0, 1, 1, 0}.threshold()), Error);
}

TEST_CASE("sNB examples") {
  const Threshold z(0.5);
  // everything below the threshold and treat-all unprofitable
  const std::vector<double> low{0.1, 0.2, 0.3};
  const std::vector<double> truth{0.1, 0.2, 0.3};
  CHECK(snb(low, truth, z) == 0.0);
  // perfect oracle with labels
  const std::vector<double> labels{1, 0, 0, 1, 0, 0, 0, 0};
  CHECK(snb(labels, labels, z) == doctest::Approx(1.0));
  const std::vector<double> zeros(4, 0.0);
  CHECK_THROWS_AS(snb(zeros, zeros, z), Error);
  CHECK_THROWS_AS(snb(low, labels, z), Error);
}

TEST_CASE("sNB matches a per-row oracle and respects the omniscience bound") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> pred(20), ref(20);
    for (int i = 0; i < 20; ++i) {
      pred[i] = u(rng);
      ref[i] = u(rng) * 0.6;
    }
    const double zv = 0.05 + 0.5 * u(rng);
    const Threshold z(zv);
    double model = 0.0, all = 0.0, prev = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double gain = ref[i] - zv / (1 - zv) * (1 - ref[i]);
      if (pred[i] >= zv) model += gain;
      all += gain;
      prev += ref[i];
    }
    model /= 20;
    all /= 20;
    prev /= 20;
    const double expected = (model - std::max(all, 0.0)) / prev;
    const SnbParts parts = snb_parts(pred, ref, z);
    CHECK(parts.snb == doctest::Approx(expected).epsilon(1e-12));
    CHECK(parts.prevalence == doctest::Approx(prev));
    CHECK(parts.snb <= 1.0 + 1e-12);
  }
}
