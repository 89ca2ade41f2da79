// src/plda.cc

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

#include "wcfa/plda.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wcfa/errors.h"

namespace wcfa {

void PldaScoreParams::validate() const {
  if (d.empty()) throw Error("PLDA needs at least one dimension");
  for (double v : d)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error("PLDA within-class variances must be finite and >= 0");
  if (warp && warp->domain() != PwlDomain::kRealLine)
    throw Error("score warp must use the real-line domain");
}

double plda_llr(const PldaScoreParams &params, std::span<const double> phi_e,
                std::span<const double> phi_t) {
  const std::size_t dim = params.d.size();
  if (phi_e.size() != dim || phi_t.size() != dim)
    throw Error("plda_llr: expected vectors of length " + std::to_string(dim));
  double s = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    auto c = llr_coefficients<double>(std::max(params.d[k], kPldaVarianceFloor));
    s += c.a * (phi_e[k] * phi_e[k] + phi_t[k] * phi_t[k]) +
         c.b * (phi_e[k] * phi_t[k]) + c.c;
  }
  return s;
}

Diagonalization simultaneous_diagonalize(const Eigen::MatrixXd &between,
                                         const Eigen::MatrixXd &within) {
  const auto dim = between.rows();
  if (between.cols() != dim || within.rows() != dim || within.cols() != dim)
    throw Error("simultaneous_diagonalize: matrices must be square and equal-sized");
  auto symmetric = [](const Eigen::MatrixXd &m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff() <=
           1e-10 * std::max(1.0, m.cwiseAbs().maxCoeff());
  };
  if (!symmetric(between) || !symmetric(within))
    throw Error("simultaneous_diagonalize: matrices must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt_b(between);
  if (llt_b.info() != Eigen::Success)
    throw Error("simultaneous_diagonalize: between-class matrix is not positive definite");
  Eigen::LLT<Eigen::MatrixXd> llt_w(within);
  if (llt_w.info() != Eigen::Success)
    throw Error("simultaneous_diagonalize: within-class matrix is not positive definite");

  // B = L L'. With M = L^{-1} W L^{-T} = U diag(d) U', T = U' L^{-1}.
  Eigen::MatrixXd l_inv = llt_b.matrixL().solve(Eigen::MatrixXd::Identity(dim, dim));
  Eigen::MatrixXd m = l_inv * within * l_inv.transpose();
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success)
    throw Error("simultaneous_diagonalize: eigendecomposition failed");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) {
    return eig.eigenvalues()(i) > eig.eigenvalues()(j);
  });
  Diagonalization out;
  out.d.resize(dim);
  Eigen::MatrixXd u(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    Eigen::VectorXd vec = eig.eigenvectors().col(order[static_cast<std::size_t>(r)]);
    Eigen::Index big;
    vec.cwiseAbs().maxCoeff(&big);
    if (vec(big) < 0) vec = -vec;  // canonical sign
    u.col(r) = vec;
    out.d(r) = std::max(0.0, eig.eigenvalues()(order[static_cast<std::size_t>(r)]));
  }
  out.transform = u.transpose() * l_inv;
  return out;
}

std::vector<double> soft_select(std::span<const double> target,
                                const std::vector<std::vector<double>> &candidates,
                                std::span<const double> similarities, double beta) {
  if (candidates.empty() || candidates.size() != similarities.size())
    throw Error("soft_select: candidates and similarities must have the same nonzero length");
  if (!(beta >= 0.0)) throw Error("soft_select: beta must be >= 0");
  auto w = softmax(similarities, beta);
  std::vector<double> out(target.size(), 0.0);
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    if (candidates[j].size() != target.size())
      throw Error("soft_select: candidate dimension mismatch");
    for (std::size_t k = 0; k < target.size(); ++k) out[k] += w[j] * candidates[j][k];
  }
  return out;
}

ScoreSet plda_sample_worst_case_scores(const PldaScoreParams &params,
                                       std::int64_t n, int l, Rng &rng,
                                       Selection selection) {
  if (n < 1 || l < 1) throw Error("N and L must be >= 1");
  PldaModel model(params, l);
  TrialNoise noise = model.draw_noise(rng, n, l);
  std::vector<double> scores;
  model.trial_scores<double>(model.view<double>(model.raw()), noise, selection, scores);
  return ScoreSet(std::move(scores));
}

namespace {
double raw_from_variance(double d) {
  double v = d - kPldaVarianceFloor;
  if (v <= 1e-300) return -700.0;  // softplus(-700) underflows to 0
  return v > 30.0 ? v + std::log1p(-std::exp(-v)) : std::log(std::expm1(v));
}
}  // namespace

PldaModel::PldaModel(const PldaScoreParams &params, int scores_per_pair)
    : dim_(params.dim()), scores_per_pair_(scores_per_pair) {
  params.validate();
  if (scores_per_pair < 1) throw Error("scores_per_pair must be >= 1");
  for (double d : params.d) raw_.push_back(raw_from_variance(d));
  if (params.warp) {
    warp_ = params.warp->knot_inputs();
    raw_.insert(raw_.end(), params.warp->raw_offsets().begin(),
                params.warp->raw_offsets().end());
  }
}

PldaModel PldaModel::from_artifact(const ModelArtifact &artifact) {
  artifact.validate();
  if (artifact.family != Family::kPlda) throw Error("artifact is not a PLDA model");
  PldaScoreParams params;
  params.d.assign(static_cast<std::size_t>(artifact.structure.dim), 1.0);
  if (artifact.structure.warp) {
    const auto &x = artifact.structure.warp->knot_inputs;
    params.warp.emplace(PwlDomain::kRealLine, x,
                        std::vector<double>(artifact.params.end() - static_cast<std::ptrdiff_t>(x.size()),
                                            artifact.params.end()));
  }
  PldaModel model(params, artifact.structure.scores_per_pair);
  model.raw_ = artifact.params;
  return model;
}

ModelArtifact PldaModel::to_artifact(const Provenance &provenance) const {
  ModelArtifact a;
  a.family = Family::kPlda;
  a.structure.dim = dim_;
  a.structure.scores_per_pair = scores_per_pair_;
  if (warp_) a.structure.warp = PwlLayout{PwlDomain::kRealLine, *warp_};
  a.params = raw_;
  a.provenance = provenance;
  a.validate();
  return a;
}

PldaScoreParams PldaModel::params() const {
  PldaScoreParams p;
  for (int k = 0; k < dim_; ++k) p.d.push_back(ad::softplus(raw_[k]) + kPldaVarianceFloor);
  if (warp_)
    p.warp.emplace(PwlDomain::kRealLine, *warp_,
                   std::vector<double>(raw_.begin() + dim_, raw_.end()));
  return p;
}

void PldaModel::set_raw(std::vector<double> raw) {
  if (raw.size() != raw_.size()) throw Error("set_raw: parameter count mismatch");
  raw_ = std::move(raw);
}

TrialNoise PldaModel::draw_noise(Rng &rng, std::int64_t n, int l) const {
  TrialNoise noise;
  noise.n = n;
  noise.l = l;
  std::normal_distribution<double> normal;
  noise.latent.resize(static_cast<std::size_t>((n + 1) * dim_));
  for (auto &y : noise.latent) y = normal(rng);
  noise.score.resize(static_cast<std::size_t>(l) * 2 * dim_);
  for (auto &z : noise.score) z = normal(rng);
  return noise;
}

double PldaModel::relative_similarity(std::span<const double> a,
                                      std::span<const double> b,
                                      const double *y_e, const double *y_j,
                                      int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += a[k] * y_j[k] * y_j[k] + b[k] * y_e[k] * y_j[k];
  return s;
}

}  // namespace wcfa
