// wcfa/loc_scale.h

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

#ifndef WCFA_LOC_SCALE_H_
#define WCFA_LOC_SCALE_H_

// Location-scale score models. Each (target, impostor) pair gets
// (mu, log sigma) from a bivariate Gaussian hyper-distribution; the closest
// impostor is the one with the largest mu, and its scores are
// mu + sigma * Q(u), u ~ U(0, 1), for a base quantile Q (Gaussian or a
// learnable monotone piecewise-linear function), optionally warped.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wcfa/autodiff.h"
#include "wcfa/model_artifact.h"
#include "wcfa/monotone_pwl.h"
#include "wcfa/normal.h"
#include "wcfa/parallel.h"
#include "wcfa/sampling.h"
#include "wcfa/score_table.h"

namespace wcfa {

/// u is clamped to [kQuantileClamp, 1 - kQuantileClamp] before the base
/// quantile is applied.
inline constexpr double kQuantileClamp = 1e-6;
/// Floor applied to standard deviations and Cholesky diagonals by the
/// moment-matching fit.
inline constexpr double kScaleFloor = 1e-6;

struct LocScaleParams {
  std::array<double, 2> hyper_mean{0.0, 0.0};  // mean of (mu, log sigma)
  std::array<double, 3> hyper_chol{1.0, 0.0, 1.0};  // l00, l10, l11
  std::optional<MonotonePwl> quantile;  // unset: Gaussian base
  std::optional<MonotonePwl> warp;

  void validate() const;
};

struct PairParams {
  double mu;
  double sigma;
};

/// (mu, log sigma) = hyper_mean + hyper_chol * eps, eps ~ N(0, I).
std::vector<PairParams> sample_pair_params(const LocScaleParams &params,
                                           std::int64_t count, Rng &rng);

struct WorstCaseSample {
  ScoreSet scores;
  double selected_mu;
  double selected_sigma;
};

WorstCaseSample ls_sample_worst_case_scores(const LocScaleParams &params,
                                            std::int64_t n, int l, Rng &rng,
                                            Selection selection = Selection::hard());

/// Moment-matching generative baseline: per-pair sample mean and (population)
/// standard deviation, then the sample mean and covariance of
/// (mu_hat, log sigma_hat) across pairs. Gaussian base, no warp.
LocScaleParams fit_generative_gaussian_baseline(const PairScoreTable &table);

class LocScaleModel {
 public:
  static constexpr std::size_t kHyperParams = 5;

  LocScaleModel(const LocScaleParams &params, int scores_per_pair);
  static LocScaleModel from_artifact(const ModelArtifact &artifact);
  ModelArtifact to_artifact(const Provenance &provenance = {}) const;

  LocScaleParams params() const;
  Family family() const { return quantile_ ? Family::kPwlLs : Family::kGaussianLs; }
  int scores_per_pair() const { return scores_per_pair_; }
  const std::vector<double> &raw() const { return raw_; }
  void set_raw(std::vector<double> raw);

  /// latent: (eps0_j, eps1_j) for j < n; score: u_l for l < l.
  TrialNoise draw_noise(Rng &rng, std::int64_t n, int l) const;

  template <class S>
  struct View {
    S m0, m1, l00, l10, l11;
    std::vector<S> quantile;  // realized knot values
    std::vector<S> warp;
  };

  template <class S>
  View<S> view(std::span<const S> raw) const;

  /// Scores of the selected pair for one trial.
  template <class S>
  void trial_scores(const View<S> &v, const TrialNoise &noise,
                    Selection selection, std::vector<S> &out) const;

  /// Selection with the hard rule: index of the largest mu.
  static std::size_t select_hard(const TrialNoise &noise, double m0, double l00);

 private:
  std::optional<std::vector<double>> quantile_;  // knot inputs
  std::optional<std::vector<double>> warp_;
  int scores_per_pair_;
  std::vector<double> raw_;
};

template <class S>
LocScaleModel::View<S> LocScaleModel::view(std::span<const S> raw) const {
  View<S> v{raw[0], raw[1], ad::exp(raw[2]), raw[3], ad::exp(raw[4]), {}, {}};
  std::size_t off = kHyperParams;
  if (quantile_) {
    v.quantile = constrain_params<S>(raw.subspan(off, quantile_->size()));
    off += quantile_->size();
  }
  if (warp_) v.warp = constrain_params<S>(raw.subspan(off, warp_->size()));
  return v;
}

template <class S>
void LocScaleModel::trial_scores(const View<S> &v, const TrialNoise &noise,
                                 Selection selection,
                                 std::vector<S> &out) const {
  const std::size_t n = static_cast<std::size_t>(noise.n);
  const double *eps = noise.latent.data();
  S mu, sigma;
  if (selection.is_hard() || n == 1) {
    std::size_t k = select_hard(noise, ad::value_of(v.m0), ad::value_of(v.l00));
    mu = v.m0 + v.l00 * eps[2 * k];
    sigma = ad::exp(v.m1 + v.l10 * eps[2 * k] + v.l11 * eps[2 * k + 1]);
  } else {
    // Softmax over standardized locations (mu_j - m0) / l00 = eps0_j, so the
    // weights are fixed by the noise; gradients flow through the mixture.
    std::vector<double> z(n);
    for (std::size_t j = 0; j < n; ++j) z[j] = eps[2 * j];
    auto w = softmax(z, selection.beta);
    double mean_eps0 = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean_eps0 += w[j] * eps[2 * j];
    mu = v.m0 + v.l00 * mean_eps0;
    const double m1 = ad::value_of(v.m1), l10 = ad::value_of(v.l10),
                 l11 = ad::value_of(v.l11);
    double value = 0.0, d_l10 = 0.0, d_l11 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (w[j] == 0.0) continue;
      double sj = w[j] * std::exp(m1 + l10 * eps[2 * j] + l11 * eps[2 * j + 1]);
      value += sj;
      d_l10 += sj * eps[2 * j];
      d_l11 += sj * eps[2 * j + 1];
    }
    ad::Node<S> node(value);
    node.add(v.m1, value);
    node.add(v.l10, d_l10);
    node.add(v.l11, d_l11);
    sigma = node.finish();
  }

  out.clear();
  out.reserve(static_cast<std::size_t>(noise.l));
  for (int i = 0; i < noise.l; ++i) {
    double u = std::clamp(noise.score[i], kQuantileClamp, 1.0 - kQuantileClamp);
    S base = quantile_ ? pwl_eval<S>(*quantile_, v.quantile, S(u))
                       : S(normal_quantile(u));
    S s = mu + sigma * base;
    if (warp_) s = pwl_eval<S>(*warp_, v.warp, s);
    out.push_back(s);
  }
}

}  // namespace wcfa

#endif  // WCFA_LOC_SCALE_H_
