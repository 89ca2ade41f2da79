// src/loc_scale.cc

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

#include "wcfa/loc_scale.h"

#include <cmath>

#include "wcfa/errors.h"

namespace wcfa {

void LocScaleParams::validate() const {
  for (double v : hyper_mean)
    if (!std::isfinite(v)) throw Error("hyper mean must be finite");
  if (!(hyper_chol[0] > 0.0) || !(hyper_chol[2] > 0.0) || !std::isfinite(hyper_chol[1]))
    throw Error("hyper Cholesky factor needs a positive diagonal");
  if (quantile && quantile->domain() != PwlDomain::kUnitInterval)
    throw Error("base quantile must use the unit-interval domain");
  if (warp && warp->domain() != PwlDomain::kRealLine)
    throw Error("score warp must use the real-line domain");
}

std::vector<PairParams> sample_pair_params(const LocScaleParams &params,
                                           std::int64_t count, Rng &rng) {
  params.validate();
  if (count < 1) throw Error("sample_pair_params: count must be >= 1");
  std::normal_distribution<double> normal;
  std::vector<PairParams> out;
  out.reserve(static_cast<std::size_t>(count));
  const auto &m = params.hyper_mean;
  const auto &c = params.hyper_chol;
  for (std::int64_t j = 0; j < count; ++j) {
    double e0 = normal(rng), e1 = normal(rng);
    out.push_back({m[0] + c[0] * e0, std::exp(m[1] + c[1] * e0 + c[2] * e1)});
  }
  return out;
}

WorstCaseSample ls_sample_worst_case_scores(const LocScaleParams &params,
                                            std::int64_t n, int l, Rng &rng,
                                            Selection selection) {
  if (n < 1 || l < 1) throw Error("N and L must be >= 1");
  LocScaleModel model(params, l);
  TrialNoise noise = model.draw_noise(rng, n, l);
  auto v = model.view<double>(model.raw());
  std::vector<double> scores;
  model.trial_scores<double>(v, noise, selection, scores);

  double mu, sigma;
  if (selection.is_hard() || n == 1) {
    std::size_t k = LocScaleModel::select_hard(noise, v.m0, v.l00);
    mu = v.m0 + v.l00 * noise.latent[2 * k];
    sigma = std::exp(v.m1 + v.l10 * noise.latent[2 * k] + v.l11 * noise.latent[2 * k + 1]);
  } else {
    std::vector<double> z(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = noise.latent[2 * j];
    auto w = softmax(z, selection.beta);
    mu = 0.0;
    sigma = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      mu += w[j] * (v.m0 + v.l00 * z[j]);
      sigma += w[j] * std::exp(v.m1 + v.l10 * z[j] + v.l11 * noise.latent[2 * j + 1]);
    }
  }
  return WorstCaseSample{ScoreSet(std::move(scores)), mu, sigma};
}

LocScaleParams fit_generative_gaussian_baseline(const PairScoreTable &table) {
  const auto &pairs = table.pairs();
  if (pairs.size() < 2) throw Error("generative baseline needs >= 2 speaker pairs");
  const double np = static_cast<double>(pairs.size());
  std::vector<double> mus, log_sigmas;
  mus.reserve(pairs.size());
  log_sigmas.reserve(pairs.size());
  for (const auto &p : pairs) {
    if (p.scores.size() < 2)
      throw Error("generative baseline needs >= 2 scores for every pair");
    double mean = p.scores.mean();
    double ss = 0.0;
    for (double s : p.scores.scores()) ss += (s - mean) * (s - mean);
    double sd = std::sqrt(ss / static_cast<double>(p.scores.size()));
    mus.push_back(mean);
    log_sigmas.push_back(std::log(std::max(sd, kScaleFloor)));
  }
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    m0 += mus[i];
    m1 += log_sigmas[i];
  }
  m0 /= np;
  m1 /= np;
  double c00 = 0.0, c10 = 0.0, c11 = 0.0;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    double a = mus[i] - m0, b = log_sigmas[i] - m1;
    c00 += a * a;
    c10 += a * b;
    c11 += b * b;
  }
  c00 /= np;
  c10 /= np;
  c11 /= np;
  LocScaleParams p;
  p.hyper_mean = {m0, m1};
  double l00 = std::sqrt(std::max(c00, kScaleFloor * kScaleFloor));
  double l10 = c10 / l00;
  double l11 = std::sqrt(std::max(c11 - l10 * l10, kScaleFloor * kScaleFloor));
  p.hyper_chol = {l00, l10, l11};
  return p;
}

LocScaleModel::LocScaleModel(const LocScaleParams &params, int scores_per_pair)
    : scores_per_pair_(scores_per_pair) {
  params.validate();
  if (scores_per_pair < 1) throw Error("scores_per_pair must be >= 1");
  raw_ = {params.hyper_mean[0], params.hyper_mean[1], std::log(params.hyper_chol[0]),
          params.hyper_chol[1], std::log(params.hyper_chol[2])};
  if (params.quantile) {
    quantile_ = params.quantile->knot_inputs();
    raw_.insert(raw_.end(), params.quantile->raw_offsets().begin(),
                params.quantile->raw_offsets().end());
  }
  if (params.warp) {
    warp_ = params.warp->knot_inputs();
    raw_.insert(raw_.end(), params.warp->raw_offsets().begin(),
                params.warp->raw_offsets().end());
  }
}

LocScaleModel LocScaleModel::from_artifact(const ModelArtifact &artifact) {
  artifact.validate();
  if (artifact.family == Family::kPlda) throw Error("artifact is not a location-scale model");
  const auto &p = artifact.params;
  LocScaleParams params;
  params.hyper_mean = {p[0], p[1]};
  params.hyper_chol = {std::exp(p[2]), p[3], std::exp(p[4])};
  std::size_t off = kHyperParams;
  auto slice = [&](std::size_t len) {
    std::vector<double> r(p.begin() + static_cast<std::ptrdiff_t>(off),
                          p.begin() + static_cast<std::ptrdiff_t>(off + len));
    off += len;
    return r;
  };
  if (artifact.structure.quantile) {
    const auto &x = artifact.structure.quantile->knot_inputs;
    params.quantile.emplace(PwlDomain::kUnitInterval, x, slice(x.size()));
  }
  if (artifact.structure.warp) {
    const auto &x = artifact.structure.warp->knot_inputs;
    params.warp.emplace(PwlDomain::kRealLine, x, slice(x.size()));
  }
  LocScaleModel model(params, artifact.structure.scores_per_pair);
  // Keep the exact stored raw values (exp/log round trips are not bit-exact).
  model.raw_ = p;
  return model;
}

ModelArtifact LocScaleModel::to_artifact(const Provenance &provenance) const {
  ModelArtifact a;
  a.family = family();
  a.structure.dim = 0;
  a.structure.scores_per_pair = scores_per_pair_;
  if (quantile_) a.structure.quantile = PwlLayout{PwlDomain::kUnitInterval, *quantile_};
  if (warp_) a.structure.warp = PwlLayout{PwlDomain::kRealLine, *warp_};
  a.params = raw_;
  a.provenance = provenance;
  a.validate();
  return a;
}

LocScaleParams LocScaleModel::params() const {
  LocScaleParams p;
  p.hyper_mean = {raw_[0], raw_[1]};
  p.hyper_chol = {std::exp(raw_[2]), raw_[3], std::exp(raw_[4])};
  std::size_t off = kHyperParams;
  if (quantile_) {
    p.quantile.emplace(PwlDomain::kUnitInterval, *quantile_,
                       std::vector<double>(raw_.begin() + static_cast<std::ptrdiff_t>(off),
                                           raw_.begin() + static_cast<std::ptrdiff_t>(off + quantile_->size())));
    off += quantile_->size();
  }
  if (warp_)
    p.warp.emplace(PwlDomain::kRealLine, *warp_,
                   std::vector<double>(raw_.begin() + static_cast<std::ptrdiff_t>(off),
                                       raw_.begin() + static_cast<std::ptrdiff_t>(off + warp_->size())));
  return p;
}

void LocScaleModel::set_raw(std::vector<double> raw) {
  if (raw.size() != raw_.size()) throw Error("set_raw: parameter count mismatch");
  raw_ = std::move(raw);
}

TrialNoise LocScaleModel::draw_noise(Rng &rng, std::int64_t n, int l) const {
  TrialNoise noise;
  noise.n = n;
  noise.l = l;
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  noise.latent.resize(static_cast<std::size_t>(2 * n));
  for (auto &e : noise.latent) e = normal(rng);
  noise.score.resize(static_cast<std::size_t>(l));
  for (auto &u : noise.score) u = uniform(rng);
  return noise;
}

std::size_t LocScaleModel::select_hard(const TrialNoise &noise, double m0, double l00) {
  std::size_t best = 0;
  double best_mu = m0 + l00 * noise.latent[0];
  for (std::size_t j = 1; j < static_cast<std::size_t>(noise.n); ++j) {
    double mu = m0 + l00 * noise.latent[2 * j];
    if (mu > best_mu) {
      best_mu = mu;
      best = j;
    }
  }
  return best;
}

}  // namespace wcfa
