// src/score_model.cc

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

#include "wcfa/score_model.h"

#include <algorithm>

#include "wcfa/errors.h"

namespace wcfa {

ScoreModel ScoreModel::from_artifact(const ModelArtifact &artifact) {
  if (artifact.family == Family::kPlda) return PldaModel::from_artifact(artifact);
  return LocScaleModel::from_artifact(artifact);
}

ModelArtifact ScoreModel::to_artifact(const Provenance &provenance) const {
  return std::visit([&](const auto &m) { return m.to_artifact(provenance); }, impl_);
}

Family ScoreModel::family() const {
  if (const auto *ls = std::get_if<LocScaleModel>(&impl_)) return ls->family();
  return Family::kPlda;
}

int ScoreModel::scores_per_pair() const {
  return std::visit([](const auto &m) { return m.scores_per_pair(); }, impl_);
}

const std::vector<double> &ScoreModel::raw() const {
  return std::visit([](const auto &m) -> const std::vector<double> & { return m.raw(); },
                    impl_);
}

void ScoreModel::set_raw(std::vector<double> raw) {
  std::visit([&](auto &m) { m.set_raw(std::move(raw)); }, impl_);
}

TrialNoise ScoreModel::draw_noise(Rng &rng, std::int64_t n, int l) const {
  if (n < 1 || l < 1) throw Error("draw_noise: N and L must be >= 1");
  return std::visit([&](const auto &m) { return m.draw_noise(rng, n, l); }, impl_);
}

std::vector<double> ScoreModel::hard_trial_scores(const TrialNoise &noise) const {
  return std::visit(
      [&](const auto &m) {
        auto view = m.template view<double>(std::span<const double>(m.raw()));
        std::vector<double> out;
        m.template trial_scores<double>(view, noise, Selection::hard(), out);
        return out;
      },
      impl_);
}

std::vector<TrialNoise> draw_query_noise(const ScoreModel &model,
                                         std::int64_t n, std::int64_t trials,
                                         std::uint64_t seed, Stream stream,
                                         std::uint64_t index) {
  if (trials < 1) throw Error("trials must be >= 1");
  std::vector<TrialNoise> noise;
  noise.reserve(static_cast<std::size_t>(trials));
  for (std::int64_t i = 0; i < trials; ++i) {
    Rng rng = make_rng(seed, stream, index, static_cast<std::uint64_t>(i));
    noise.push_back(model.draw_noise(rng, n, model.scores_per_pair()));
  }
  return noise;
}

std::vector<std::vector<double>> model_trial_fa(const ScoreModel &model,
                                                std::int64_t n,
                                                std::span<const double> taus,
                                                std::int64_t trials,
                                                std::uint64_t seed,
                                                int threads) {
  if (n < 1) throw Error("N must be >= 1");
  if (trials < 1) throw Error("trials must be >= 1");
  std::vector<std::vector<double>> out(taus.size(),
                                       std::vector<double>(static_cast<std::size_t>(trials)));
  const int l = model.scores_per_pair();
  parallel_for(
      static_cast<std::size_t>(trials),
      [&](std::size_t i) {
        Rng rng = make_rng(seed, Stream::kTrial, i);
        auto scores = model.hard_trial_scores(model.draw_noise(rng, n, l));
        ScoreSet set(std::move(scores));
        for (std::size_t t = 0; t < taus.size(); ++t) {
          auto sorted = set.sorted();
          auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), taus[t]);
          out[t][i] = static_cast<double>(above) / static_cast<double>(sorted.size());
        }
      },
      threads);
  return out;
}

double model_fa(const ScoreModel &model, std::int64_t n, double tau,
                std::int64_t trials, std::uint64_t seed, int threads) {
  double taus[] = {tau};
  auto per = model_trial_fa(model, n, taus, trials, seed, threads);
  double s = 0.0;
  for (double v : per[0]) s += v;  // fixed order
  return s / static_cast<double>(trials);
}

std::vector<double> model_zero_effort_scores(const ScoreModel &model,
                                             std::int64_t count,
                                             std::uint64_t seed) {
  std::vector<double> pooled;
  for (std::int64_t i = 0; i < count; ++i) {
    Rng rng = make_rng(seed, Stream::kTrial, static_cast<std::uint64_t>(i));
    auto s = model.hard_trial_scores(model.draw_noise(rng, 1, model.scores_per_pair()));
    pooled.insert(pooled.end(), s.begin(), s.end());
  }
  return pooled;
}

}  // namespace wcfa
