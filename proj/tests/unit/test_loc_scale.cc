// tests/unit/test_loc_scale.cc

// Copyright 2026  The wcfa Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include "doctest.h"
#include "wcfa/errors.h"
#include "wcfa/loc_scale.h"

using namespace wcfa;

namespace {

LocScaleParams standard() {
  LocScaleParams p;
  p.hyper_mean = {0.0, 0.0};
  p.hyper_chol = {1.0, 0.0, 1.0};
  return p;
}

TrialNoise fixed_noise(std::vector<double> eps, std::vector<double> u) {
  TrialNoise n;
  n.n = static_cast<std::int64_t>(eps.size() / 2);
  n.l = static_cast<int>(u.size());
  n.latent = std::move(eps);
  n.score = std::move(u);
  return n;
}

std::vector<double> run_trial(const LocScaleModel &m, const TrialNoise &noise, Selection sel) {
  std::vector<double> out;
  m.trial_scores<double>(m.view<double>(m.raw()), noise, sel, out);
  return out;
}

}  // namespace

TEST_CASE("degenerate hyper covariance pins every pair to the hyper mean") {
  LocScaleParams p;
  p.hyper_mean = {0.7, -0.2};
  p.hyper_chol = {1e-12, 0.0, 1e-12};
  Rng rng(1);
  for (const auto &pp : sample_pair_params(p, 1000, rng)) {
    CHECK(pp.mu == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(pp.sigma == doctest::Approx(std::exp(-0.2)).epsilon(1e-9));
  }
}

TEST_CASE("standard hyper distribution: mean location near zero, scales positive") {
  Rng rng(2);
  auto pairs = sample_pair_params(standard(), 100000, rng);
  double s = 0.0;
  for (const auto &pp : pairs) {
    s += pp.mu;
    REQUIRE(pp.sigma > 0.0);
  }
  CHECK(std::abs(s / 100000.0) < 0.02);
}

TEST_CASE("parameter validation") {
  LocScaleParams p = standard();
  p.hyper_chol[0] = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = standard();
  p.warp = MonotonePwl::normal_quantile(4);  // wrong domain for a warp
  CHECK_THROWS_AS(p.validate(), Error);
  p = standard();
  p.quantile = MonotonePwl::identity(0.0, 1.0, 4);  // wrong domain for a quantile
  CHECK_THROWS_AS(p.validate(), Error);
  Rng rng(0);
  CHECK_THROWS_AS(sample_pair_params(standard(), 0, rng), Error);
  CHECK_THROWS_AS(ls_sample_worst_case_scores(standard(), 0, 1, rng), Error);
}

TEST_CASE("N = 1 is plain location-scale sampling from the single pair") {
  LocScaleModel m(standard(), 3);
  auto noise = fixed_noise({0.4, -0.3}, {0.1, 0.5, 0.9});
  auto s = run_trial(m, noise, Selection::hard());
  const double mu = 0.4, sigma = std::exp(-0.3);
  REQUIRE(s.size() == 3);
  CHECK(s[0] == doctest::Approx(mu + sigma * normal_quantile(0.1)).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(mu).epsilon(1e-12));  // median of the symmetric base
  CHECK(s[2] == doctest::Approx(mu + sigma * normal_quantile(0.9)).epsilon(1e-12));
  auto soft = run_trial(m, noise, Selection::soft(10.0));
  CHECK(soft == s);
}

TEST_CASE("unit-scale Gaussian base: emitted scores average to zero") {
  LocScaleParams p;
  p.hyper_chol = {1e-12, 0.0, 1e-12};
  Rng rng(3);
  double s = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws / 10; ++i) {
    auto w = ls_sample_worst_case_scores(p, 1, 10, rng);
    for (double v : w.scores.scores()) s += v;
  }
  CHECK(std::abs(s / draws) < 0.02);
}

TEST_CASE("closest of two locations averages 1/sqrt(pi)") {
  // Oracle: E[max(Z1, Z2)] = 1/sqrt(pi), cross-checked by a direct simulation.
  LocScaleParams p;
  p.hyper_chol = {1.0, 0.0, 1e-12};
  Rng rng(4);
  const int draws = 100000;
  double s = 0.0;
  for (int i = 0; i < draws; ++i) s += ls_sample_worst_case_scores(p, 2, 1, rng).selected_mu;
  const double closed = 1.0 / std::sqrt(M_PI);
  CHECK(std::abs(s / draws - closed) < 0.01);

  std::mt19937_64 gen(99);
  std::normal_distribution<double> normal;
  double d = 0.0;
  for (int i = 0; i < draws; ++i) d += std::max(normal(gen), normal(gen));
  CHECK(std::abs(d / draws - closed) < 0.01);
}

TEST_CASE("hard selection takes the largest location, lowest index on ties") {
  LocScaleModel m(standard(), 1);
  auto noise = fixed_noise({0.1, 0.0, 0.8, 0.5, 0.8, -0.5, -2.0, 0.0}, {0.5});
  CHECK(LocScaleModel::select_hard(noise, 0.0, 1.0) == 1);
  auto w = run_trial(m, noise, Selection::hard());
  CHECK(w[0] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("property: selection ignores shifts and monotone rescaling of locations") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> normal;
  for (int inst = 0; inst < 1000; ++inst) {
    std::int64_t n = 1 + static_cast<std::int64_t>(gen() % 30);
    TrialNoise noise;
    noise.n = n;
    noise.l = 1;
    noise.latent.resize(static_cast<std::size_t>(2 * n));
    for (double &e : noise.latent) e = normal(gen);
    noise.score = {0.5};
    std::size_t k = LocScaleModel::select_hard(noise, 0.0, 1.0);
    REQUIRE(LocScaleModel::select_hard(noise, normal(gen) * 10, 1.0) == k);
    REQUIRE(LocScaleModel::select_hard(noise, normal(gen), std::exp(normal(gen))) == k);
  }
}

TEST_CASE("soft selection approaches hard selection for large beta") {
  LocScaleParams p = standard();
  p.hyper_chol = {0.8, 0.2, 0.4};
  LocScaleModel m(p, 4);
  Rng rng(6);
  for (int inst = 0; inst < 200; ++inst) {
    auto noise = m.draw_noise(rng, 1 + inst % 20, 4);
    auto hard = run_trial(m, noise, Selection::hard());
    auto soft = run_trial(m, noise, Selection::soft(1e7));
    for (std::size_t i = 0; i < hard.size(); ++i)
      REQUIRE(soft[i] == doctest::Approx(hard[i]).epsilon(1e-6));
  }
}

TEST_CASE("identity warp leaves scores unchanged") {
  LocScaleParams p = standard();
  p.quantile = MonotonePwl::normal_quantile(16);
  LocScaleModel plain(p, 5);
  p.warp = MonotonePwl::identity(-6.0, 6.0, 16);
  LocScaleModel warped(p, 5);
  Rng rng(7);
  for (int inst = 0; inst < 100; ++inst) {
    auto noise = plain.draw_noise(rng, 7, 5);
    auto a = run_trial(plain, noise, Selection::hard());
    auto b = run_trial(warped, noise, Selection::hard());
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(b[i] == doctest::Approx(a[i]).epsilon(1e-9));
  }
}

TEST_CASE("soft-selection scores are differentiable in every raw parameter") {
  LocScaleParams p;
  p.hyper_mean = {0.3, -0.4};
  p.hyper_chol = {0.9, 0.2, 0.5};
  p.quantile = MonotonePwl::normal_quantile(8);
  p.warp = MonotonePwl::identity(-5.0, 5.0, 8);
  LocScaleModel m(p, 6);
  Rng rng(8);
  std::vector<TrialNoise> noise;
  for (int i = 0; i < 10; ++i) noise.push_back(m.draw_noise(rng, 1 + i, 6));
  auto total = [&](auto raw) {
    using S = typename std::decay_t<decltype(raw)>::value_type;
    auto v = m.view<S>(raw);
    std::vector<S> acc, out;
    for (const auto &tn : noise) {
      m.trial_scores<S>(v, tn, Selection::soft(3.0), out);
      for (auto &s : out) acc.push_back(s);
    }
    S sum = acc[0];
    for (std::size_t i = 1; i < acc.size(); ++i) sum = sum + acc[i] * (1.0 + 0.01 * i);
    return sum;
  };
  ad::Objective f = [&](std::span<const ad::Var> x) { return total(x); };
  auto g = [&](std::span<const double> x) { return total(x); };
  auto r = ad::finite_difference_check(f, m.raw(), 1e-6, 1e-5, g);
  CHECK(r.passed);
  for (double a : r.analytic) CHECK(std::isfinite(a));
}

TEST_CASE("moment-matching baseline on identical {0, 1} pairs") {
  std::vector<ScoreRecord> r;
  for (const char *t : {"X", "Y", "Z"}) {
    r.push_back({"A", t, 0.0, {}});
    r.push_back({"A", t, 1.0, {}});
  }
  auto p = fit_generative_gaussian_baseline(PairScoreTable::from_records(r));
  CHECK(p.hyper_mean[0] == doctest::Approx(0.5));
  CHECK(p.hyper_mean[1] == doctest::Approx(std::log(0.5)));
  CHECK(p.hyper_chol[0] == doctest::Approx(kScaleFloor));
  CHECK(p.hyper_chol[1] == doctest::Approx(0.0));
  CHECK(p.hyper_chol[2] == doctest::Approx(kScaleFloor));
  CHECK_FALSE(p.quantile.has_value());
  CHECK_FALSE(p.warp.has_value());
}

TEST_CASE("moment-matching baseline recovers a known hyper mean") {
  LocScaleParams truth;
  truth.hyper_mean = {1.0, -0.5};
  truth.hyper_chol = {0.5, 0.1, 0.3};
  Rng rng(9);
  auto pairs = sample_pair_params(truth, 2000, rng);
  std::normal_distribution<double> normal;
  std::vector<ScoreRecord> r;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (int k = 0; k < 50; ++k)
      r.push_back({"e" + std::to_string(i), "t" + std::to_string(i),
                   pairs[i].mu + pairs[i].sigma * normal(rng), {}});
  auto p = fit_generative_gaussian_baseline(PairScoreTable::from_records(r));
  CHECK(std::abs(p.hyper_mean[0] - 1.0) < 0.05);
  CHECK(std::abs(p.hyper_mean[1] + 0.5) < 0.05);
}

TEST_CASE("moment-matching baseline preconditions") {
  std::vector<ScoreRecord> one = {{"A", "X", 0.0, {}}, {"A", "X", 1.0, {}}};
  CHECK_THROWS_AS(fit_generative_gaussian_baseline(PairScoreTable::from_records(one)), Error);
  std::vector<ScoreRecord> thin = {{"A", "X", 0.0, {}}, {"A", "X", 1.0, {}}, {"A", "Y", 1.0, {}}};
  CHECK_THROWS_AS(fit_generative_gaussian_baseline(PairScoreTable::from_records(thin)), Error);
}

TEST_CASE("artifact round trip keeps raw parameters exactly") {
  LocScaleParams p = standard();
  p.quantile = MonotonePwl::normal_quantile(6);
  p.warp = MonotonePwl::identity(-1.0, 2.0, 3);
  LocScaleModel m(p, 9);
  std::vector<double> raw = m.raw();
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] += 0.01 * static_cast<double>(i);
  m.set_raw(raw);
  auto back = LocScaleModel::from_artifact(m.to_artifact());
  CHECK(back.raw() == raw);
  CHECK(back.family() == Family::kPwlLs);
  CHECK(back.scores_per_pair() == 9);
  CHECK_THROWS_AS(m.set_raw({1.0}), Error);
}
