// wcfa/score_model.h

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

#ifndef WCFA_SCORE_MODEL_H_
#define WCFA_SCORE_MODEL_H_

// Family-independent front end over the score generators. Everything that
// trains or evaluates a model goes through ScoreModel so the three families
// share one noise layout, one relaxation and one hard estimator.

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "wcfa/autodiff.h"
#include "wcfa/errors.h"
#include "wcfa/loc_scale.h"
#include "wcfa/model_artifact.h"
#include "wcfa/parallel.h"
#include "wcfa/plda.h"
#include "wcfa/sampling.h"

namespace wcfa {

class ScoreModel {
 public:
  using Impl = std::variant<LocScaleModel, PldaModel>;

  ScoreModel(LocScaleModel model) : impl_(std::move(model)) {}  // NOLINT
  ScoreModel(PldaModel model) : impl_(std::move(model)) {}      // NOLINT

  static ScoreModel from_artifact(const ModelArtifact &artifact);
  ModelArtifact to_artifact(const Provenance &provenance = {}) const;

  Family family() const;
  int scores_per_pair() const;
  const std::vector<double> &raw() const;
  void set_raw(std::vector<double> raw);
  const Impl &impl() const { return impl_; }

  TrialNoise draw_noise(Rng &rng, std::int64_t n, int l) const;

  /// Mean over trials and scores of sigmoid(slope * (s - tau)), with scores
  /// from the soft-selection sampler evaluated at `raw`.
  template <class S>
  S relaxed_fa(std::span<const S> raw, std::span<const TrialNoise> noise,
               double tau, double slope, Selection selection) const;

  /// Scores of one trial under hard selection at the current parameters.
  std::vector<double> hard_trial_scores(const TrialNoise &noise) const;

 private:
  Impl impl_;
};

template <class S>
S ScoreModel::relaxed_fa(std::span<const S> raw,
                         std::span<const TrialNoise> noise, double tau,
                         double slope, Selection selection) const {
  if (noise.empty()) throw Error("relaxed_fa: no trials");
  return std::visit(
      [&](const auto &m) -> S {
        auto view = m.template view<S>(raw);
        std::size_t count = 0;
        for (const auto &tn : noise) count += static_cast<std::size_t>(tn.l);
        const double inv = 1.0 / static_cast<double>(count);
        double total = 0.0;
        std::vector<S> scores;
        std::vector<S> all;
        std::vector<double> partial;
        if constexpr (ad::is_var_v<S>) {
          all.reserve(count);
          partial.reserve(count);
        }
        for (const auto &tn : noise) {
          m.template trial_scores<S>(view, tn, selection, scores);
          for (const S &s : scores) {
            double p = ad::sigmoid(slope * (ad::value_of(s) - tau));
            total += p;
            if constexpr (ad::is_var_v<S>) {
              all.push_back(s);
              partial.push_back(slope * p * (1.0 - p) * inv);
            }
          }
        }
        ad::Node<S> node(total * inv);
        if constexpr (ad::is_var_v<S>) {
          for (std::size_t i = 0; i < all.size(); ++i)
            if (partial[i] != 0.0) node.add(all[i], partial[i]);
        }
        return node.finish();
      },
      impl_);
}

/// Noise for `trials` trials of one query, trial i seeded from
/// (seed, stream, index, i).
std::vector<TrialNoise> draw_query_noise(const ScoreModel &model,
                                         std::int64_t n, std::int64_t trials,
                                         std::uint64_t seed, Stream stream,
                                         std::uint64_t index);

/// Hard-selection, hard-threshold estimates. Trial i draws its noise from
/// (seed, kTrial, i) regardless of n, so candidate sets are nested across n.
/// Returns per-trial FA fractions indexed [tau][trial].
std::vector<std::vector<double>> model_trial_fa(const ScoreModel &model,
                                                std::int64_t n,
                                                std::span<const double> taus,
                                                std::int64_t trials,
                                                std::uint64_t seed,
                                                int threads = 0);

/// Mean of model_trial_fa for a single threshold.
double model_fa(const ScoreModel &model, std::int64_t n, double tau,
                std::int64_t trials, std::uint64_t seed, int threads = 0);

/// Zero-effort scores (n = 1), pooled over `count` pairs.
std::vector<double> model_zero_effort_scores(const ScoreModel &model,
                                             std::int64_t count,
                                             std::uint64_t seed);

}  // namespace wcfa

#endif  // WCFA_SCORE_MODEL_H_
