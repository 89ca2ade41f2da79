// wcfa/plda.h

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

#ifndef WCFA_PLDA_H_
#define WCFA_PLDA_H_

// Two-covariance PLDA used as a score generator. After simultaneous
// diagonalization the between-class covariance is the identity and the
// within-class covariance is diag(d), so the model is D non-negative
// numbers. Per dimension, with e and t the enrollment and test coordinates,
//
//   llr_k(e, t) = a_k (e^2 + t^2) + b_k e t + c_k,
//   a_k = -1 / (2 d_k (d_k + 2) (1 + d_k)),
//   b_k =  1 / (d_k (d_k + 2)),
//   c_k =  log(1 + b_k) / 2,
//
// the log ratio of N(0, [[1+d, 1], [1, 1+d]]) to N(0, diag(1+d, 1+d)).

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wcfa/autodiff.h"
#include "wcfa/model_artifact.h"
#include "wcfa/monotone_pwl.h"
#include "wcfa/parallel.h"
#include "wcfa/sampling.h"
#include "wcfa/score_table.h"

namespace wcfa {

inline constexpr double kPldaVarianceFloor = 1e-8;
inline constexpr int kDefaultPldaDim = 10;

struct PldaScoreParams {
  std::vector<double> d;  // within-class variances, >= 0
  std::optional<MonotonePwl> warp;

  int dim() const { return static_cast<int>(d.size()); }
  void validate() const;
};

template <class S>
struct LlrCoefficients {
  S a, b, c;
};

template <class S>
LlrCoefficients<S> llr_coefficients(const S &d) {
  S dd2 = d * (d + 2.0);
  S b = 1.0 / dd2;
  return {-0.5 * b / (1.0 + d), b, 0.5 * ad::log1p(b)};
}

/// Closed-form LLR (target vs nontarget hypothesis); symmetric in its inputs.
double plda_llr(const PldaScoreParams &params, std::span<const double> phi_e,
                std::span<const double> phi_t);

struct Diagonalization {
  Eigen::MatrixXd transform;  // rows are the new coordinates
  Eigen::VectorXd d;          // descending
};

/// Returns T with T B T' = I and T W T' = diag(d). Throws if B or W is not
/// symmetric positive definite.
Diagonalization simultaneous_diagonalize(const Eigen::MatrixXd &between,
                                         const Eigen::MatrixXd &within);

/// sum_j softmax(beta * sim)_j * candidates_j.
std::vector<double> soft_select(std::span<const double> target,
                                const std::vector<std::vector<double>> &candidates,
                                std::span<const double> similarities, double beta);

/// Zero-effort (N = 1) or closest-of-N impostor scores for a fresh target.
ScoreSet plda_sample_worst_case_scores(const PldaScoreParams &params,
                                       std::int64_t n, int l, Rng &rng,
                                       Selection selection = Selection::hard());

class PldaModel {
 public:
  PldaModel(const PldaScoreParams &params, int scores_per_pair);
  static PldaModel from_artifact(const ModelArtifact &artifact);
  ModelArtifact to_artifact(const Provenance &provenance = {}) const;

  PldaScoreParams params() const;
  int dim() const { return dim_; }
  int scores_per_pair() const { return scores_per_pair_; }
  const std::vector<double> &raw() const { return raw_; }
  void set_raw(std::vector<double> raw);

  /// latent: y_e (D) then y_j (D each) for j < n; score: for each score,
  /// z_e (D) then z_t (D).
  TrialNoise draw_noise(Rng &rng, std::int64_t n, int l) const;

  template <class S>
  struct View {
    std::vector<S> a, b, sd;  // per-dimension LLR coefficients, sqrt(d)
    S c_sum;
    std::vector<S> warp;
  };

  template <class S>
  View<S> view(std::span<const S> raw) const;

  template <class S>
  void trial_scores(const View<S> &v, const TrialNoise &noise,
                    Selection selection, std::vector<S> &out) const;

  /// Similarity of candidate j up to a term shared by all candidates: the
  /// noise-free LLR between the target and candidate latents minus
  /// sum_k (a_k y_e,k^2 + c_k). Argmax and softmax weights are unaffected.
  static double relative_similarity(std::span<const double> a,
                                    std::span<const double> b,
                                    const double *y_e, const double *y_j,
                                    int dim);

 private:
  int dim_;
  int scores_per_pair_;
  std::optional<std::vector<double>> warp_;  // knot inputs
  std::vector<double> raw_;
};

template <class S>
PldaModel::View<S> PldaModel::view(std::span<const S> raw) const {
  View<S> v;
  v.a.reserve(dim_);
  v.b.reserve(dim_);
  v.sd.reserve(dim_);
  std::vector<S> cs;
  for (int k = 0; k < dim_; ++k) {
    S d = ad::softplus(raw[k]) + kPldaVarianceFloor;
    auto coef = llr_coefficients<S>(d);
    v.a.push_back(coef.a);
    v.b.push_back(coef.b);
    cs.push_back(coef.c);
    v.sd.push_back(ad::sqrt(d));
  }
  if constexpr (ad::is_var_v<S>) {
    v.c_sum = ad::sum(cs);
  } else {
    v.c_sum = ad::sum(std::span<const double>(cs));
  }
  if (warp_) v.warp = constrain_params<S>(raw.subspan(dim_, warp_->size()));
  return v;
}

template <class S>
void PldaModel::trial_scores(const View<S> &v, const TrialNoise &noise,
                             Selection selection, std::vector<S> &out) const {
  const int dim = dim_;
  const std::size_t n = static_cast<std::size_t>(noise.n);
  const double *y_e = noise.latent.data();
  const double *cand = y_e + dim;

  std::vector<double> a(dim), b(dim);
  for (int k = 0; k < dim; ++k) {
    a[k] = ad::value_of(v.a[k]);
    b[k] = ad::value_of(v.b[k]);
  }

  std::vector<S> y_sel(dim);
  if (selection.is_hard() || n == 1) {
    std::size_t best = 0;
    double best_sim = relative_similarity(a, b, y_e, cand, dim);
    for (std::size_t j = 1; j < n; ++j) {
      double sim = relative_similarity(a, b, y_e, cand + j * dim, dim);
      if (sim > best_sim) {
        best_sim = sim;
        best = j;
      }
    }
    for (int k = 0; k < dim; ++k) y_sel[k] = S(cand[best * dim + k]);
  } else {
    std::vector<double> sim_values(n);
    std::vector<S> sims;
    if constexpr (ad::is_var_v<S>) sims.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double *y_j = cand + j * dim;
      sim_values[j] = relative_similarity(a, b, y_e, y_j, dim);
      if constexpr (ad::is_var_v<S>) {
        ad::Node<S> node(sim_values[j]);
        for (int k = 0; k < dim; ++k) {
          node.add(v.a[k], y_j[k] * y_j[k]);
          node.add(v.b[k], y_e[k] * y_j[k]);
        }
        sims.push_back(node.finish());
      }
    }
    auto w = softmax(sim_values, selection.beta);
    for (int k = 0; k < dim; ++k) {
      double yk = 0.0;
      for (std::size_t j = 0; j < n; ++j) yk += w[j] * cand[j * dim + k];
      ad::Node<S> node(yk);
      if constexpr (ad::is_var_v<S>) {
        // d ybar_k / d sim_j = beta w_j (y_jk - ybar_k)
        for (std::size_t j = 0; j < n; ++j)
          if (w[j] != 0.0)
            node.add(sims[j], selection.beta * w[j] * (cand[j * dim + k] - yk));
      }
      y_sel[k] = node.finish();
    }
  }

  std::vector<double> sd(dim), ys(dim);
  for (int k = 0; k < dim; ++k) {
    sd[k] = ad::value_of(v.sd[k]);
    ys[k] = ad::value_of(y_sel[k]);
  }
  const double c_sum = ad::value_of(v.c_sum);
  out.clear();
  out.reserve(static_cast<std::size_t>(noise.l));
  std::vector<double> pe(dim), pt(dim);
  for (int i = 0; i < noise.l; ++i) {
    const double *z_e = noise.score.data() + static_cast<std::size_t>(i) * 2 * dim;
    const double *z_t = z_e + dim;
    double s = c_sum;
    for (int k = 0; k < dim; ++k) {
      pe[k] = y_e[k] + sd[k] * z_e[k];
      pt[k] = ys[k] + sd[k] * z_t[k];
      s += a[k] * (pe[k] * pe[k] + pt[k] * pt[k]) + b[k] * pe[k] * pt[k];
    }
    ad::Node<S> node(s);
    if constexpr (ad::is_var_v<S>) {
      node.add(v.c_sum, 1.0);
      for (int k = 0; k < dim; ++k) {
        double ds_dpe = 2.0 * a[k] * pe[k] + b[k] * pt[k];
        double ds_dpt = 2.0 * a[k] * pt[k] + b[k] * pe[k];
        node.add(v.a[k], pe[k] * pe[k] + pt[k] * pt[k]);
        node.add(v.b[k], pe[k] * pt[k]);
        node.add(v.sd[k], ds_dpe * z_e[k] + ds_dpt * z_t[k]);
        node.add(y_sel[k], ds_dpt);
      }
    }
    S score = node.finish();
    if (warp_) score = pwl_eval<S>(*warp_, v.warp, score);
    out.push_back(score);
  }
}

}  // namespace wcfa

#endif  // WCFA_PLDA_H_
