// src/training.cc

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

#include "wcfa/training.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include "json.hpp"
#include <random>

#include "wcfa/adam.h"
#include "wcfa/errors.h"

namespace wcfa {

namespace {

double pooled_std(const std::vector<double> &x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size()));
}

// d_k = d0 * 2^(1 - 2k/(D-1)): a geometric spread from 2 d0 down to d0 / 2.
std::vector<double> spread_variances(double d0, int dim) {
  std::vector<double> d(static_cast<std::size_t>(dim), d0);
  if (dim > 1)
    for (int k = 0; k < dim; ++k)
      d[static_cast<std::size_t>(k)] = d0 * std::exp2(1.0 - 2.0 * k / (dim - 1));
  return d;
}

std::vector<double> perturb(std::vector<double> raw, Rng &rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  for (double &v : raw) v += normal(rng);
  return raw;
}

}  // namespace

void TrainConfig::validate() const {
  if (trials < 1) throw Error("trials must be >= 1");
  if (batch_size < 1) throw Error("batch size must be >= 1");
  if (!(lr > 0.0)) throw Error("learning rate must be > 0");
  if (steps < 0) throw Error("steps must be >= 0");
  if (!(alpha > 0.0)) throw Error("alpha must be > 0");
  if (!(beta > 0.0)) throw Error("beta must be > 0");
  if (n_train_max < 2) throw Error("n_train_max must be >= 2 (N is drawn from [1, n_train_max))");
  if (tau_min && tau_max && !(*tau_min < *tau_max))
    throw Error("tau_min must be below tau_max");
  if (scores_per_pair && *scores_per_pair < 1) throw Error("scores per pair must be >= 1");
  if (score_scale && !(*score_scale > 0.0)) throw Error("score scale must be > 0");
  if (!(loss_smoothing >= 0.0 && loss_smoothing < 1.0))
    throw Error("loss smoothing must be in [0, 1)");
}

TrainConfig TrainConfig::resolved(const PairScoreTable &table) const {
  validate();
  if (static_cast<std::size_t>(n_train_max - 1) > table.max_impostors())
    throw Error("n_train_max " + std::to_string(n_train_max) +
                " needs " + std::to_string(n_train_max - 1) +
                " impostors but the table has only " +
                std::to_string(table.max_impostors()));
  TrainConfig out = *this;
  auto pooled = table.pooled_scores();
  if (!out.tau_min) out.tau_min = quantile(pooled, 0.001);
  if (!out.tau_max) out.tau_max = quantile(pooled, 0.999);
  if (!(*out.tau_min < *out.tau_max)) throw Error("empty tau range");
  if (!out.scores_per_pair) out.scores_per_pair = static_cast<int>(table.median_pair_size());
  if (!out.score_scale) {
    double sd = pooled_std(pooled);
    out.score_scale = sd > 0.0 ? sd : 1.0;
  }
  return out;
}

std::string TrainConfig::to_json() const {
  nlohmann::ordered_json j;
  j["trials"] = trials;
  j["batch_size"] = batch_size;
  j["lr"] = lr;
  j["steps"] = steps;
  j["alpha"] = alpha;
  j["beta"] = beta;
  j["n_train_max"] = n_train_max;
  j["tau_min"] = tau_min ? nlohmann::ordered_json(*tau_min) : nlohmann::ordered_json();
  j["tau_max"] = tau_max ? nlohmann::ordered_json(*tau_max) : nlohmann::ordered_json();
  j["scores_per_pair"] = scores_per_pair ? nlohmann::ordered_json(*scores_per_pair) : nlohmann::ordered_json();
  j["score_scale"] = score_scale ? nlohmann::ordered_json(*score_scale) : nlohmann::ordered_json();
  j["loss_smoothing"] = loss_smoothing;
  j["seed"] = seed;
  return j.dump();
}

std::vector<TrainTarget> make_training_batch(const PairScoreTable &table,
                                             const TrainConfig &cfg, Rng &rng) {
  if (!cfg.tau_min || !cfg.tau_max) throw Error("make_training_batch: unresolved config");
  std::uniform_int_distribution<std::int64_t> pick_n(1, cfg.n_train_max - 1);
  std::uniform_real_distribution<double> pick_tau(*cfg.tau_min, *cfg.tau_max);
  std::vector<TrainTarget> batch(static_cast<std::size_t>(cfg.batch_size));
  std::vector<std::uint64_t> seeds(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    batch[i].query.n = pick_n(rng);
    batch[i].query.tau = pick_tau(rng);
    seeds[i] = rng();
  }
  parallel_for(
      batch.size(),
      [&](std::size_t i) {
        SimConfig sim{cfg.trials, seeds[i], false, 1};
        batch[i].empirical_p_fa = worst_case_fa_empirical(table, batch[i].query, sim).p_fa;
      },
      cfg.threads);
  return batch;
}

ScoreModel initial_model(const FamilyOptions &options,
                         const PairScoreTable &table, const TrainConfig &cfg) {
  if (!cfg.scores_per_pair) throw Error("initial_model: unresolved config");
  const int l = *cfg.scores_per_pair;
  if (options.knots < 1) throw Error("knot count must be >= 1");
  auto pooled = table.pooled_scores();
  auto [lo_it, hi_it] = std::minmax_element(pooled.begin(), pooled.end());
  double lo = *lo_it, hi = *hi_it;
  if (!(lo < hi)) hi = lo + 1.0;
  // Warp knots span the score range widened by 10% (5% per side).
  double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  if (options.family != Family::kPlda) {
    LocScaleParams p = fit_generative_gaussian_baseline(table);
    if (options.family == Family::kPwlLs)
      p.quantile = MonotonePwl::normal_quantile(options.knots);
    if (options.warp) p.warp = MonotonePwl::identity(lo, hi, options.knots);
    return LocScaleModel(p, l);
  }

  if (options.dim < 1) throw Error("PLDA dimension must be >= 1");
  // One-dimensional search over the overall within-class scale, scored by
  // the squared error of hard estimates on a fixed probe batch.
  TrainConfig probe_cfg = cfg;
  probe_cfg.batch_size = 20;
  probe_cfg.trials = std::min<std::int64_t>(cfg.trials, 100);
  Rng probe_rng = make_rng(cfg.seed, Stream::kInit);
  auto probe = make_training_batch(table, probe_cfg, probe_rng);

  std::vector<double> grid;
  for (int i = 0; i <= 16; ++i) grid.push_back(std::pow(10.0, -2.0 + 0.25 * i));
  std::vector<ScoreModel> candidates;
  for (double d0 : grid)
    candidates.emplace_back(PldaModel(PldaScoreParams{spread_variances(d0, options.dim), {}}, l));

  std::vector<std::vector<double>> sq(probe.size(), std::vector<double>(grid.size()));
  parallel_for(
      probe.size(),
      [&](std::size_t q) {
        auto noise = draw_query_noise(candidates[0], probe[q].query.n, probe_cfg.trials,
                                      cfg.seed, Stream::kInit, q + 1);
        for (std::size_t g = 0; g < grid.size(); ++g) {
          double e = hard_fa_estimate(candidates[g], probe[q].query, noise) -
                     probe[q].empirical_p_fa;
          sq[q][g] = e * e;
        }
      },
      cfg.threads);
  std::size_t best = 0;
  double best_err = INFINITY;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double err = 0.0;
    for (const auto &row : sq) err += row[g];
    if (err < best_err) {
      best_err = err;
      best = g;
    }
  }

  PldaScoreParams params{spread_variances(grid[best], options.dim), {}};
  if (options.warp) {
    auto s = model_zero_effort_scores(candidates[best], 200, cfg.seed);
    auto [smin, smax] = std::minmax_element(s.begin(), s.end());
    double wlo = *smin, whi = *smax;
    if (!(wlo < whi)) whi = wlo + 1.0;
    double wpad = 0.05 * (whi - wlo);
    params.warp = MonotonePwl::identity(wlo - wpad, whi + wpad, options.knots);
  }
  return PldaModel(params, l);
}

double relaxed_fa_estimate(const ScoreModel &model, const FaQuery &query,
                           const TrainConfig &cfg,
                           std::span<const TrialNoise> noise) {
  query.validate();
  double scale = cfg.score_scale.value_or(1.0);
  return model.relaxed_fa<double>(std::span<const double>(model.raw()), noise,
                                  query.tau, cfg.alpha / scale,
                                  Selection::soft(cfg.beta));
}

double hard_fa_estimate(const ScoreModel &model, const FaQuery &query,
                        std::span<const TrialNoise> noise) {
  query.validate();
  if (noise.empty()) throw Error("hard_fa_estimate: no trials");
  double total = 0.0;
  for (const auto &tn : noise) {
    auto scores = model.hard_trial_scores(tn);
    double above = 0.0;
    for (double s : scores) above += s > query.tau ? 1.0 : 0.0;
    total += above / static_cast<double>(scores.size());
  }
  return total / static_cast<double>(noise.size());
}

TrainResult train_discriminative(const FamilyOptions &options,
                                 const PairScoreTable &table,
                                 const TrainConfig &cfg) {
  TrainConfig rc = cfg.resolved(table);
  return train_from(initial_model(options, table, rc), table, rc);
}

TrainResult train_from(ScoreModel model, const PairScoreTable &table,
                       const TrainConfig &cfg) {
  const TrainConfig rc = cfg.resolved(table);
  const double slope = rc.alpha / *rc.score_scale;
  const auto start = std::chrono::steady_clock::now();

  std::vector<double> raw = model.raw();
  std::vector<double> best_raw = raw;
  AdamState adam(raw.size(), rc.lr);
  TrainResult result;
  double ema = 0.0, best_ema = INFINITY;

  const std::size_t batch = static_cast<std::size_t>(rc.batch_size);
  for (int step = 0; step < rc.steps; ++step) {
    Rng batch_rng = make_rng(rc.seed, Stream::kBatch, static_cast<std::uint64_t>(step));
    auto targets = make_training_batch(table, rc, batch_rng);

    std::vector<ad::ValueAndGrad> parts(batch);
    parallel_for(
        batch,
        [&](std::size_t i) {
          auto noise = draw_query_noise(
              model, targets[i].query.n, rc.trials,
              derive_seed(rc.seed, Stream::kModelNoise, static_cast<std::uint64_t>(step), i),
              Stream::kModelNoise, 0);
          double tau = targets[i].query.tau;
          parts[i] = ad::value_and_grad(
              [&](std::span<const ad::Var> x) {
                return model.relaxed_fa<ad::Var>(x, noise, tau, slope,
                                                 Selection::soft(rc.beta));
              },
              raw);
        },
        rc.threads);

    double loss = 0.0;
    std::vector<double> grad(raw.size(), 0.0);
    for (std::size_t i = 0; i < batch; ++i) {
      double diff = parts[i].value - targets[i].empirical_p_fa;
      loss += diff * diff;
      for (std::size_t k = 0; k < raw.size(); ++k)
        grad[k] += 2.0 * diff * parts[i].grad[k];
    }
    loss /= static_cast<double>(batch);
    double norm = 0.0;
    for (double &g : grad) {
      g /= static_cast<double>(batch);
      norm += g * g;
    }
    norm = std::sqrt(norm);
    if (!std::isfinite(loss) || !std::isfinite(norm))
      throw Error("non-finite training loss at step " + std::to_string(step));

    ema = step == 0 ? loss : rc.loss_smoothing * ema + (1.0 - rc.loss_smoothing) * loss;
    if (ema < best_ema) {
      best_ema = ema;
      best_raw = raw;
      result.best_step = step;
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.push_back({step, loss, norm, wall});

    adam_step(adam, raw, grad);
    model.set_raw(raw);
  }

  model.set_raw(best_raw);
  Provenance prov{"discriminative", fnv1a_hex(rc.to_json()), rc.seed};
  result.artifact = model.to_artifact(prov);
  return result;
}

void write_train_log(const std::vector<TrainLogEntry> &log,
                     const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  for (const auto &e : log) {
    nlohmann::ordered_json j;
    j["step"] = e.step;
    j["loss"] = e.loss;
    j["grad_norm"] = e.grad_norm;
    j["wall_time"] = e.wall_seconds;
    out << j.dump() << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

ad::GradCheckReport gradcheck_training_objective(const FamilyOptions &options,
                                                 const GradCheckConfig &cfg) {
  if (cfg.trials < 1 || cfg.n_max < 1 || cfg.scores_per_pair < 1 || cfg.batch_size < 1)
    throw Error("gradcheck: trials, n_max, L and batch size must be >= 1");
  Rng rng = make_rng(cfg.seed, Stream::kInit);
  std::optional<ScoreModel> model;
  if (options.family == Family::kPlda) {
    PldaModel base(PldaScoreParams{spread_variances(0.5, options.dim), {}}, cfg.scores_per_pair);
    PldaScoreParams p = base.params();
    if (options.warp) {
      auto s = model_zero_effort_scores(base, 200, cfg.seed);
      p.warp = MonotonePwl::identity(quantile(s, 0.01), quantile(s, 0.99), options.knots);
    }
    model.emplace(PldaModel(p, cfg.scores_per_pair));
  } else {
    LocScaleParams p;
    p.hyper_mean = {0.2, -0.5};
    p.hyper_chol = {0.8, 0.1, 0.3};
    if (options.family == Family::kPwlLs) p.quantile = MonotonePwl::normal_quantile(options.knots);
    if (options.warp) p.warp = MonotonePwl::identity(-3.0, 3.0, options.knots);
    model.emplace(LocScaleModel(p, cfg.scores_per_pair));
  }
  model->set_raw(perturb(model->raw(), rng, 0.05));

  auto pooled = model_zero_effort_scores(*model, 200, cfg.seed + 1);
  const double slope = cfg.alpha / std::max(pooled_std(pooled), 1e-12);
  std::uniform_int_distribution<std::int64_t> pick_n(1, cfg.n_max);
  std::uniform_real_distribution<double> pick_tau(quantile(pooled, 0.1), quantile(pooled, 0.9));
  std::uniform_real_distribution<double> pick_p(0.0, 1.0);
  std::vector<TrainTarget> targets;
  std::vector<std::vector<TrialNoise>> noise;
  for (int i = 0; i < cfg.batch_size; ++i) {
    TrainTarget t;
    t.query.n = pick_n(rng);
    t.query.tau = pick_tau(rng);
    t.empirical_p_fa = pick_p(rng);
    targets.push_back(t);
    noise.push_back(draw_query_noise(*model, t.query.n, cfg.trials, cfg.seed,
                                     Stream::kModelNoise, static_cast<std::uint64_t>(i)));
  }
  const ScoreModel &m = *model;
  ad::Objective f = [&](std::span<const ad::Var> x) {
    return batch_loss<ad::Var>(m, x, targets, noise, slope, cfg.beta);
  };
  auto g = [&](std::span<const double> x) {
    return batch_loss<double>(m, x, targets, noise, slope, cfg.beta);
  };
  return ad::finite_difference_check(f, m.raw(), cfg.epsilon, cfg.tolerance, g);
}

void ValidationConfig::validate() const {
  if (n_lo < 1 || n_hi < n_lo) throw Error("validation N range must satisfy 1 <= lo <= hi");
  if (!(tau_min <= tau_max)) throw Error("validation tau range is empty");
  if (queries < 1) throw Error("validation needs at least one query");
  if (trials < 1) throw Error("trials must be >= 1");
}

double mae_percent(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw Error("mae_percent: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 100.0 * s / static_cast<double>(a.size());
}

ValidationReport validate_mae(const ModelArtifact &artifact,
                              const PairScoreTable &table,
                              const ValidationConfig &cfg) {
  cfg.validate();
  if (static_cast<std::size_t>(cfg.n_hi) > table.max_impostors())
    throw Error("validation N up to " + std::to_string(cfg.n_hi) +
                " exceeds the table's " + std::to_string(table.max_impostors()) +
                " impostors");
  ScoreModel model = ScoreModel::from_artifact(artifact);
  ValidationReport report;
  std::vector<double> est, emp;
  for (int q = 0; q < cfg.queries; ++q) {
    Rng rng = make_rng(cfg.seed, Stream::kValidation, static_cast<std::uint64_t>(q));
    std::uniform_int_distribution<std::int64_t> pick_n(cfg.n_lo, cfg.n_hi);
    std::uniform_real_distribution<double> pick_tau(cfg.tau_min, cfg.tau_max);
    ValidationQuery v;
    v.query.n = pick_n(rng);
    v.query.tau = pick_tau(rng);
    v.model_p_fa = model_fa(model, v.query.n, v.query.tau, cfg.trials,
                            derive_seed(cfg.seed, Stream::kValidation, q, 1), cfg.threads);
    SimConfig sim{cfg.trials, derive_seed(cfg.seed, Stream::kValidation, q, 2), false,
                  cfg.threads};
    v.empirical_p_fa = worst_case_fa_empirical(table, v.query, sim).p_fa;
    est.push_back(v.model_p_fa);
    emp.push_back(v.empirical_p_fa);
    report.queries.push_back(v);
  }
  report.mae_percent = mae_percent(est, emp);
  return report;
}

FaCurve extrapolate(const ModelArtifact &artifact,
                    std::span<const std::int64_t> n_grid,
                    std::span<const double> taus, std::int64_t trials,
                    std::uint64_t seed, const CiOptions &ci, int threads) {
  ScoreModel model = ScoreModel::from_artifact(artifact);
  FaCurve curve;
  std::uint64_t row = 0;
  for (std::int64_t n : n_grid) {
    auto per = model_trial_fa(model, n, taus, trials, seed, threads);
    for (std::size_t t = 0; t < taus.size(); ++t) {
      FaQuery{n, taus[t]}.validate();
      Rng rng = make_rng(seed, Stream::kBootstrap, row++);
      curve.rows.push_back(make_curve_row(n, taus[t], per[t], ci, rng));
    }
  }
  return curve;
}

}  // namespace wcfa
