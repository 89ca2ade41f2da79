// wcfa/training.h

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

#ifndef WCFA_TRAINING_H_
#define WCFA_TRAINING_H_

// Discriminative fitting of score models to empirical worst-case FA rates.
// Each step draws a batch of (N, tau) queries, estimates their FA rates on
// the table, and moves the model parameters to reduce the squared error
// between a relaxed (sigmoid, soft-argmax) model estimate and the targets.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wcfa/autodiff.h"
#include "wcfa/estimator.h"
#include "wcfa/fa_curve.h"
#include "wcfa/model_artifact.h"
#include "wcfa/score_model.h"
#include "wcfa/score_table.h"

namespace wcfa {

struct TrainConfig {
  std::int64_t trials = 300;  // per estimate, both sides
  int batch_size = 20;
  double lr = 1e-3;
  int steps = 2000;
  double alpha = 20.0;  // sigmoid slope on standardized scores
  double beta = 10.0;   // soft-argmax scale
  std::int64_t n_train_max = 660;  // N drawn from [1, n_train_max)
  std::optional<double> tau_min;   // default: 0.1% score quantile
  std::optional<double> tau_max;   // default: 99.9% score quantile
  std::optional<int> scores_per_pair;  // default: median pair size
  std::optional<double> score_scale;   // default: pooled score std
  double loss_smoothing = 0.9;  // EMA factor used to pick the best step
  std::uint64_t seed = 0;
  int threads = 0;

  void validate() const;
  /// Fills the optional fields from the table and checks that the table can
  /// supply n_train_max - 1 impostors.
  TrainConfig resolved(const PairScoreTable &table) const;
  std::string to_json() const;
};

struct FamilyOptions {
  Family family = Family::kPlda;
  int dim = kDefaultPldaDim;
  bool warp = false;
  int knots = kDefaultPwlSegments;  // segments of each PWL
};

struct TrainTarget {
  FaQuery query;
  double empirical_p_fa = 0.0;
};

/// `cfg` must be resolved. Per-target simulation seeds come from `rng`.
std::vector<TrainTarget> make_training_batch(const PairScoreTable &table,
                                             const TrainConfig &cfg, Rng &rng);

/// Starting point for discriminative training. `cfg` must be resolved.
ScoreModel initial_model(const FamilyOptions &options,
                         const PairScoreTable &table, const TrainConfig &cfg);

double relaxed_fa_estimate(const ScoreModel &model, const FaQuery &query,
                           const TrainConfig &cfg,
                           std::span<const TrialNoise> noise);
double hard_fa_estimate(const ScoreModel &model, const FaQuery &query,
                        std::span<const TrialNoise> noise);

/// Mean squared error over a batch; `noise[i]` holds the trials of target i.
template <class S>
S batch_loss(const ScoreModel &model, std::span<const S> raw,
             std::span<const TrainTarget> targets,
             std::span<const std::vector<TrialNoise>> noise, double slope,
             double beta) {
  if (targets.size() != noise.size() || targets.empty())
    throw Error("batch_loss: one noise set per target required");
  std::vector<S> terms;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    S est = model.relaxed_fa<S>(raw, noise[i], targets[i].query.tau, slope,
                                Selection::soft(beta));
    S diff = est - targets[i].empirical_p_fa;
    terms.push_back(diff * diff);
  }
  S total;
  if constexpr (ad::is_var_v<S>) {
    total = ad::sum(terms);
  } else {
    total = ad::sum(std::span<const double>(terms));
  }
  return total / static_cast<double>(targets.size());
}

struct TrainLogEntry {
  int step = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  double wall_seconds = 0.0;
};

struct TrainResult {
  ModelArtifact artifact;  // best parameters
  std::vector<TrainLogEntry> log;
  int best_step = -1;
};

TrainResult train_discriminative(const FamilyOptions &options,
                                 const PairScoreTable &table,
                                 const TrainConfig &cfg);

/// Same loop from a given starting model (used by tests and warm starts).
TrainResult train_from(ScoreModel model, const PairScoreTable &table,
                       const TrainConfig &cfg);

void write_train_log(const std::vector<TrainLogEntry> &log,
                     const std::filesystem::path &path);

struct GradCheckConfig {
  std::int64_t trials = 50;
  std::int64_t n_max = 20;
  int scores_per_pair = 5;
  int batch_size = 4;
  double alpha = 20.0;
  double beta = 10.0;
  double epsilon = 1e-5;
  double tolerance = 1e-4;
  std::uint64_t seed = 0;
};

/// Finite-difference check of the relaxed batch objective for a perturbed
/// default model of the given family, on fixed noise and random targets.
ad::GradCheckReport gradcheck_training_objective(const FamilyOptions &options,
                                                 const GradCheckConfig &cfg);

struct ValidationConfig {
  std::int64_t n_lo = 1;
  std::int64_t n_hi = 1;  // inclusive
  double tau_min = 0.0;
  double tau_max = 0.0;
  int queries = 100;
  std::int64_t trials = 1000;
  std::uint64_t seed = 0;
  int threads = 0;

  void validate() const;
};

struct ValidationQuery {
  FaQuery query;
  double model_p_fa = 0.0;
  double empirical_p_fa = 0.0;
};

struct ValidationReport {
  double mae_percent = 0.0;
  std::vector<ValidationQuery> queries;
};

/// 100 * mean |a_i - b_i|.
double mae_percent(std::span<const double> a, std::span<const double> b);

/// Mean absolute difference (percent) between hard model estimates and
/// empirical estimates on held-out (N, tau) queries.
ValidationReport validate_mae(const ModelArtifact &model,
                              const PairScoreTable &table,
                              const ValidationConfig &cfg);

/// Hard-selection model curve with bootstrap intervals over trials.
FaCurve extrapolate(const ModelArtifact &model,
                    std::span<const std::int64_t> n_grid,
                    std::span<const double> taus, std::int64_t trials,
                    std::uint64_t seed, const CiOptions &ci = {},
                    int threads = 0);

}  // namespace wcfa

#endif  // WCFA_TRAINING_H_
