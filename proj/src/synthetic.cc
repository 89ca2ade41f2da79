// src/synthetic.cc

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

#include "wcfa/synthetic.h"

#include <cmath>
#include <fstream>
#include "json.hpp"
#include <random>
#include <sstream>

#include "wcfa/errors.h"
#include "wcfa/training.h"

namespace wcfa {

void GroundTruth::validate() const {
  if (n_speakers < 2) throw Error("ground truth needs at least 2 speakers");
  if (scores_per_pair < 1) throw Error("ground truth needs scores_per_pair >= 1");
  std::visit([](const auto &p) { p.validate(); }, model);
}

ScoreModel GroundTruth::score_model() const {
  validate();
  if (const auto *p = std::get_if<PldaScoreParams>(&model))
    return PldaModel(*p, scores_per_pair);
  return LocScaleModel(std::get<LocScaleParams>(model), scores_per_pair);
}

GroundTruth ground_truth_from_json(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw Error(std::string("ground truth: invalid JSON: ") + e.what());
  }
  try {
    GroundTruth gt;
    gt.n_speakers = j.at("n_speakers").get<std::int64_t>();
    gt.scores_per_pair = j.at("scores_per_pair").get<int>();
    gt.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("model")) {
      ScoreModel m = ScoreModel::from_artifact(model_from_json(j.at("model").dump()));
      if (const auto *p = std::get_if<PldaModel>(&m.impl()))
        gt.model = p->params();
      else
        gt.model = std::get<LocScaleModel>(m.impl()).params();
    } else {
      Family family = family_from_string(j.at("family").get<std::string>());
      if (family == Family::kPlda) {
        gt.model = PldaScoreParams{j.at("d").get<std::vector<double>>(), {}};
      } else if (family == Family::kGaussianLs) {
        auto mean = j.at("hyper_mean").get<std::vector<double>>();
        auto cov = j.at("hyper_cov").get<std::vector<std::vector<double>>>();
        if (mean.size() != 2 || cov.size() != 2 || cov[0].size() != 2 || cov[1].size() != 2)
          throw Error("ground truth: hyper_mean must be a 2-vector and hyper_cov 2x2");
        if (!(cov[0][0] > 0.0) || std::abs(cov[0][1] - cov[1][0]) > 1e-12)
          throw Error("ground truth: hyper_cov must be symmetric positive definite");
        LocScaleParams p;
        p.hyper_mean = {mean[0], mean[1]};
        double l00 = std::sqrt(cov[0][0]);
        double l10 = cov[1][0] / l00;
        double r = cov[1][1] - l10 * l10;
        if (!(r > 0.0)) throw Error("ground truth: hyper_cov must be symmetric positive definite");
        p.hyper_chol = {l00, l10, std::sqrt(r)};
        gt.model = p;
      } else {
        throw Error("ground truth: pwl-ls needs the \"model\" form");
      }
    }
    gt.validate();
    return gt;
  } catch (const nlohmann::json::exception &e) {
    throw Error(std::string("ground truth: ") + e.what());
  }
}

GroundTruth load_ground_truth(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ground_truth_from_json(ss.str());
}

namespace {

std::vector<std::string> speaker_names(std::int64_t count) {
  int width = std::max<int>(4, static_cast<int>(std::to_string(count - 1).size()));
  std::vector<std::string> names;
  for (std::int64_t i = 0; i < count; ++i) {
    std::string s = std::to_string(i);
    names.push_back("spk" + std::string(static_cast<std::size_t>(width) - s.size(), '0') + s);
  }
  return names;
}

}  // namespace

PairScoreTable generate_synthetic_table(const GroundTruth &gt, int threads) {
  gt.validate();
  const auto m = static_cast<std::size_t>(gt.n_speakers);
  const auto l = static_cast<std::size_t>(gt.scores_per_pair);
  auto names = speaker_names(gt.n_speakers);
  const std::size_t pairs = m * (m - 1);
  std::vector<std::vector<double>> scores(pairs);

  if (const auto *p = std::get_if<PldaScoreParams>(&gt.model)) {
    const std::size_t dim = p->d.size();
    std::vector<double> latent(m * dim);
    Rng rng = make_rng(gt.seed, Stream::kSynthetic, 0);
    std::normal_distribution<double> normal;
    for (double &y : latent) y = normal(rng);
    std::vector<double> sd(dim);
    for (std::size_t k = 0; k < dim; ++k) sd[k] = std::sqrt(p->d[k]);
    parallel_for(
        pairs,
        [&](std::size_t idx) {
          std::size_t e = idx / (m - 1), t = idx % (m - 1);
          if (t >= e) ++t;
          Rng prng = make_rng(gt.seed, Stream::kSynthetic, 1, idx);
          std::normal_distribution<double> nd;
          std::vector<double> pe(dim), pt(dim);
          auto &out = scores[idx];
          for (std::size_t i = 0; i < l; ++i) {
            for (std::size_t k = 0; k < dim; ++k) pe[k] = latent[e * dim + k] + sd[k] * nd(prng);
            for (std::size_t k = 0; k < dim; ++k) pt[k] = latent[t * dim + k] + sd[k] * nd(prng);
            double s = plda_llr(*p, pe, pt);
            out.push_back(p->warp ? (*p->warp)(s) : s);
          }
        },
        threads);
  } else {
    const auto &lp = std::get<LocScaleParams>(gt.model);
    parallel_for(
        pairs,
        [&](std::size_t idx) {
          Rng prng = make_rng(gt.seed, Stream::kSynthetic, 1, idx);
          auto sample = ls_sample_worst_case_scores(lp, 1, gt.scores_per_pair, prng);
          auto s = sample.scores.scores();
          scores[idx].assign(s.begin(), s.end());
        },
        threads);
  }

  std::vector<ScoreRecord> records;
  records.reserve(pairs * l);
  for (std::size_t idx = 0; idx < pairs; ++idx) {
    std::size_t e = idx / (m - 1), t = idx % (m - 1);
    if (t >= e) ++t;
    for (double s : scores[idx]) records.push_back({names[e], names[t], s, std::nullopt});
  }
  return PairScoreTable::from_records(records);
}

FaCurve oracle_curve(const GroundTruth &gt, std::span<const std::int64_t> n_grid,
                     std::span<const double> taus, std::int64_t trials,
                     std::uint64_t seed, const CiOptions &ci, int threads) {
  return extrapolate(gt.score_model().to_artifact(), n_grid, taus, trials, seed, ci,
                     threads);
}

}  // namespace wcfa
