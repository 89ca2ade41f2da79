// tests/unit/test_training.cc

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
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "test_util.h"
#include "wcfa/errors.h"
#include "wcfa/synthetic.h"
#include "wcfa/training.h"

using namespace wcfa;

namespace {

GroundTruth small_truth(std::int64_t speakers = 40, int l = 8) {
  GroundTruth gt;
  gt.model = PldaScoreParams{{0.3, 1.0, 3.0}, {}};
  gt.n_speakers = speakers;
  gt.scores_per_pair = l;
  gt.seed = 5;
  return gt;
}

const PairScoreTable &small_table() {
  static const PairScoreTable table = generate_synthetic_table(small_truth(), 2);
  return table;
}

TrainConfig quick_config() {
  TrainConfig cfg;
  cfg.trials = 100;
  cfg.batch_size = 6;
  cfg.steps = 5;
  cfg.n_train_max = 20;
  cfg.seed = 3;
  cfg.threads = 2;
  return cfg;
}

double loss_at(const ScoreModel &m, std::span<const double> raw,
               std::span<const TrainTarget> targets,
               std::span<const std::vector<TrialNoise>> noise, double slope) {
  return batch_loss<double>(m, raw, targets, noise, slope, 10.0);
}

}  // namespace

TEST_CASE("resolved config fills thresholds, scale and scores per pair") {
  auto rc = quick_config().resolved(small_table());
  REQUIRE(rc.tau_min.has_value());
  REQUIRE(rc.tau_max.has_value());
  CHECK(*rc.tau_min < *rc.tau_max);
  CHECK(*rc.scores_per_pair == 8);
  CHECK(*rc.score_scale > 0.0);
  TrainConfig big = quick_config();
  big.n_train_max = 41;  // 40 speakers leave 39 impostors per target
  CHECK_THROWS_AS(big.resolved(small_table()), Error);
  TrainConfig bad = quick_config();
  bad.n_train_max = 1;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = quick_config();
  bad.tau_min = 1.0;
  bad.tau_max = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("batch with N forced to one and tau below every score") {
  TrainConfig cfg = quick_config();
  cfg.n_train_max = 2;
  cfg.tau_min = -1e9;
  cfg.tau_max = -1e8;
  auto rc = cfg.resolved(small_table());
  Rng rng(1);
  for (const auto &t : make_training_batch(small_table(), rc, rng)) {
    CHECK(t.query.n == 1);
    CHECK(t.empirical_p_fa == 1.0);
  }
}

TEST_CASE("batches are reproducible and stay inside the query ranges") {
  auto rc = quick_config().resolved(small_table());
  Rng a(9), b(9);
  auto x = make_training_batch(small_table(), rc, a);
  auto y = make_training_batch(small_table(), rc, b);
  REQUIRE(x.size() == 6);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(x[i].query.n == y[i].query.n);
    CHECK(x[i].query.tau == y[i].query.tau);
    CHECK(x[i].empirical_p_fa == y[i].empirical_p_fa);
    CHECK(x[i].query.n >= 1);
    CHECK(x[i].query.n < 20);
    CHECK(x[i].query.tau >= *rc.tau_min);
    CHECK(x[i].query.tau <= *rc.tau_max);
  }
}

TEST_CASE("a steep sigmoid reproduces the hard estimate") {
  ScoreModel m(PldaModel(PldaScoreParams{{0.3, 1.0, 3.0}, {}}, 4));
  auto noise = draw_query_noise(m, 1, 10000, 4, Stream::kTrial, 0);
  TrainConfig cfg;
  cfg.alpha = 1000.0;
  cfg.score_scale = 1.0;
  for (double tau : {-3.0, -1.0, 0.0, 1.0}) {
    FaQuery q{1, tau};
    CHECK(std::abs(relaxed_fa_estimate(m, q, cfg, noise) - hard_fa_estimate(m, q, noise)) < 0.01);
  }
  FaQuery low{1, -1e6};
  CHECK(relaxed_fa_estimate(m, low, cfg, noise) == doctest::Approx(1.0));
  CHECK(hard_fa_estimate(m, low, noise) == 1.0);
}

TEST_CASE("one small gradient step lowers the batch loss for every family") {
  auto rc = quick_config().resolved(small_table());
  const double slope = rc.alpha / *rc.score_scale;
  for (Family fam : {Family::kGaussianLs, Family::kPwlLs, Family::kPlda}) {
    CAPTURE(static_cast<int>(fam));
    FamilyOptions opt;
    opt.family = fam;
    opt.dim = 3;
    opt.knots = 8;
    ScoreModel m = initial_model(opt, small_table(), rc);
    Rng rng(2);
    auto targets = make_training_batch(small_table(), rc, rng);
    std::vector<std::vector<TrialNoise>> noise;
    for (std::size_t i = 0; i < targets.size(); ++i)
      noise.push_back(draw_query_noise(m, targets[i].query.n, rc.trials, 7, Stream::kModelNoise, i));
    auto vg = ad::value_and_grad(
        [&](std::span<const ad::Var> x) {
          return batch_loss<ad::Var>(m, x, targets, noise, slope, rc.beta);
        },
        m.raw());
    double norm = 0.0;
    for (double g : vg.grad) norm += g * g;
    norm = std::sqrt(norm);
    REQUIRE(norm > 0.0);
    std::vector<double> raw = m.raw();
    for (std::size_t k = 0; k < raw.size(); ++k) raw[k] -= 1e-4 * vg.grad[k] / norm;
    CHECK(loss_at(m, raw, targets, noise, slope) < vg.value);
    CHECK(loss_at(m, m.raw(), targets, noise, slope) == doctest::Approx(vg.value).epsilon(1e-12));
  }
}

TEST_CASE("targets produced by the model itself sit at the noise floor") {
  ScoreModel m(PldaModel(PldaScoreParams{{0.3, 1.0, 3.0}, {}}, 4));
  TrainConfig cfg;
  cfg.alpha = 1000.0;
  cfg.beta = 100.0;
  cfg.score_scale = 1.0;
  std::vector<TrainTarget> targets;
  std::vector<std::vector<TrialNoise>> noise;
  Rng rng(31);
  std::uniform_int_distribution<std::int64_t> pick_n(1, 50);
  std::uniform_real_distribution<double> pick_tau(-3.0, 1.0);
  for (std::uint64_t i = 0; i < 10; ++i) {
    TrainTarget t;
    t.query = {pick_n(rng), pick_tau(rng)};
    t.empirical_p_fa = hard_fa_estimate(m, t.query, draw_query_noise(m, t.query.n, 2000, 32, Stream::kTrial, i));
    targets.push_back(t);
    noise.push_back(draw_query_noise(m, t.query.n, 2000, 33, Stream::kModelNoise, i));
  }
  double loss = batch_loss<double>(m, m.raw(), targets, noise, cfg.alpha, cfg.beta);
  // Two independent 2000-trial estimates differ by a variance of at most
  // 2 * 0.25 / 2000 = 2.5e-4.
  CHECK(loss < 1e-3);
}

TEST_CASE("training objective gradients agree with finite differences") {
  for (Family fam : {Family::kGaussianLs, Family::kPwlLs, Family::kPlda})
    for (bool warp : {false, true}) {
      CAPTURE(static_cast<int>(fam));
      CAPTURE(warp);
      FamilyOptions opt;
      opt.family = fam;
      opt.warp = warp;
      opt.dim = 4;
      opt.knots = 8;
      auto r = gradcheck_training_objective(opt, GradCheckConfig{});
      CHECK(r.passed);
      CHECK(r.max_rel_error < 1e-4);
    }
}

TEST_CASE("mean absolute error arithmetic") {
  std::vector<double> a = {0.5}, b = {1.0};
  CHECK(mae_percent(a, b) == doctest::Approx(50.0));
  std::vector<double> c = {0.1, 0.2, 0.3};
  CHECK(mae_percent(c, c) == 0.0);
  CHECK_THROWS_AS(mae_percent(a, c), Error);
}

TEST_CASE("the generating model validates well on its own data") {
  auto gt = small_truth(200, 25);
  auto table = generate_synthetic_table(gt, 2);
  auto pooled = table.pooled_scores();
  ValidationConfig vc;
  vc.n_lo = 1;
  vc.n_hi = 100;
  vc.tau_min = quantile(pooled, 0.01);
  vc.tau_max = quantile(pooled, 0.99);
  vc.queries = 40;
  vc.trials = 2000;
  vc.seed = 8;
  vc.threads = 2;
  auto report = validate_mae(gt.score_model().to_artifact(), table, vc);
  CHECK(report.queries.size() == 40);
  CHECK(report.mae_percent < 1.0);
  vc.n_hi = 200;
  CHECK_THROWS_AS(validate_mae(gt.score_model().to_artifact(), table, vc), Error);
}

TEST_CASE("extrapolation does not depend on the thread count") {
  auto art = small_truth().score_model().to_artifact();
  std::vector<std::int64_t> ns = {1, 5};
  std::vector<double> taus = {-2.0, 0.0};
  auto a = extrapolate(art, ns, taus, 300, 4, {}, 1);
  auto b = extrapolate(art, ns, taus, 300, 4, {}, 3);
  REQUIRE(a.rows.size() == b.rows.size());
  std::vector<double> pa, pb;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    pa.push_back(a.rows[i].p_fa);
    pb.push_back(b.rows[i].p_fa);
    CHECK(a.rows[i].ci_lo == b.rows[i].ci_lo);
    CHECK(a.rows[i].ci_hi == b.rows[i].ci_hi);
  }
  CHECK(mae_percent(pa, pb) == 0.0);
}

TEST_CASE("extrapolated curves: zero-effort agreement and threshold monotonicity") {
  auto gt = small_truth();
  auto art = gt.score_model().to_artifact();
  auto zero = model_zero_effort_scores(gt.score_model(), 20000, 77);
  std::vector<std::int64_t> ns = {1, 10, 100};
  std::vector<double> taus = {-4.0, -2.0, -1.0, 0.0, 1.0, 2.0};
  auto curve = extrapolate(art, ns, taus, 4000, 6, {}, 2);
  REQUIRE(curve.rows.size() == 18);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(curve.rows[i].n == 1);
    double direct = 0.0;
    for (double s : zero) direct += s > taus[i] ? 1.0 : 0.0;
    direct /= static_cast<double>(zero.size());
    // Per-trial values average L = 8 scores of one pair, so the trial spread
    // is at most that of a single Bernoulli draw.
    double se = std::sqrt(0.25 / 4000 + 0.25 / 20000);
    CHECK(std::abs(curve.rows[i].p_fa - direct) < 4.0 * se);
  }
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t i = 1; i < 6; ++i)
      CHECK(curve.rows[6 * r + i].p_fa <= curve.rows[6 * r + i - 1].p_fa);
  for (const auto &row : curve.rows) {
    CHECK(row.ci_lo <= row.p_fa);
    CHECK(row.p_fa <= row.ci_hi);
  }
  std::vector<std::int64_t> bad = {0};
  CHECK_THROWS_AS(extrapolate(art, bad, taus, 10, 6), Error);
}

TEST_CASE("uninformative model gives a step at zero for every N") {
  GroundTruth gt;
  gt.model = PldaScoreParams{{1e6}, {}};
  auto art = gt.score_model().to_artifact();
  std::vector<std::int64_t> ns = {1, 50};
  std::vector<double> taus = {-0.01, 0.01};
  auto curve = extrapolate(art, ns, taus, 200, 1);
  CHECK(curve.rows[0].p_fa == 1.0);
  CHECK(curve.rows[1].p_fa == 0.0);
  CHECK(curve.rows[2].p_fa == 1.0);
  CHECK(curve.rows[3].p_fa == 0.0);
}

TEST_CASE("training runs are logged, reproducible and thread-count independent") {
  FamilyOptions opt;
  opt.family = Family::kGaussianLs;
  TrainConfig cfg = quick_config();
  cfg.threads = 1;
  auto a = train_discriminative(opt, small_table(), cfg);
  cfg.threads = 4;
  auto b = train_discriminative(opt, small_table(), cfg);
  CHECK(a.artifact.params == b.artifact.params);
  REQUIRE(a.log.size() == 5);
  CHECK(a.best_step >= 0);
  CHECK(a.best_step < 5);
  CHECK(a.artifact.provenance.method == "discriminative");
  CHECK(a.artifact.provenance.seed == 3);
  CHECK(a.artifact.provenance.config_hash.size() == 16);
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    CHECK(a.log[i].step == static_cast<int>(i));
    CHECK(a.log[i].loss == b.log[i].loss);
    CHECK(std::isfinite(a.log[i].grad_norm));
  }

  testing::TempDir dir;
  write_train_log(a.log, dir / "log.jsonl");
  std::istringstream in(testing::read_file(dir / "log.jsonl"));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j.contains("step"));
    CHECK(j.contains("loss"));
    CHECK(j.contains("grad_norm"));
    CHECK(j.contains("wall_time"));
    ++lines;
  }
  CHECK(lines == 5);
  CHECK_THROWS_AS(write_train_log(a.log, dir / "missing" / "log.jsonl"), Error);
}

TEST_CASE("training moves a poor start toward the data") {
  auto rc = quick_config();
  rc.steps = 60;
  rc.lr = 0.05;
  rc.batch_size = 10;
  ScoreModel start(PldaModel(PldaScoreParams{{30.0, 30.0, 30.0}, {}}, 8));
  auto result = train_from(start, small_table(), rc);
  auto pooled = small_table().pooled_scores();
  ValidationConfig vc;
  vc.n_lo = 1;
  vc.n_hi = 19;
  vc.tau_min = quantile(pooled, 0.01);
  vc.tau_max = quantile(pooled, 0.99);
  vc.queries = 30;
  vc.trials = 500;
  vc.threads = 2;
  double before = validate_mae(start.to_artifact(), small_table(), vc).mae_percent;
  double after = validate_mae(result.artifact, small_table(), vc).mae_percent;
  CHECK(after < before);
}
