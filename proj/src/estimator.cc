// src/estimator.cc

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

#include "wcfa/estimator.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wcfa/errors.h"

namespace wcfa {

void FaQuery::validate() const {
  if (n < 1) throw Error("query N must be >= 1");
  if (!std::isfinite(tau)) throw Error("query tau must be finite");
}

void SimConfig::validate() const {
  if (trials < 1) throw Error("number of trials must be >= 1");
}

double fa_rate(const ScoreSet &scores, double tau) {
  auto sorted = scores.sorted();
  auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), tau);
  return static_cast<double>(above) / static_cast<double>(sorted.size());
}

double zero_effort_fa(const PairScoreTable &table, double tau) {
  if (table.pairs().empty()) throw Error("zero_effort_fa: empty table");
  double sum = 0.0;
  for (const auto &p : table.pairs()) sum += fa_rate(p.scores, tau);
  return sum / static_cast<double>(table.pairs().size());
}

std::vector<std::size_t> worst_case_selection(const PairScoreTable &table,
                                              std::int64_t n,
                                              const SimConfig &cfg) {
  cfg.validate();
  if (n < 1) throw Error("N must be >= 1");
  const auto &targets = table.targets();
  if (targets.empty()) throw Error("table has no target speakers");
  const std::size_t m = table.speakers().size();
  if (!cfg.with_replacement && static_cast<std::size_t>(n) > m - 1)
    throw Error("N = " + std::to_string(n) + " exceeds the " +
                std::to_string(m - 1) + " available impostors");

  std::vector<std::size_t> selected(static_cast<std::size_t>(cfg.trials));
  parallel_for(
      selected.size(),
      [&](std::size_t trial) {
        Rng rng = make_rng(cfg.seed, Stream::kTrial, trial);
        std::uniform_int_distribution<std::size_t> pick_target(0, targets.size() - 1);
        const std::uint32_t target = targets[pick_target(rng)];
        // Impostor pool: every speaker except the target, in token order.
        std::vector<std::uint32_t> pool;
        pool.reserve(m - 1);
        for (std::uint32_t s = 0; s < m; ++s)
          if (s != target) pool.push_back(s);
        const std::size_t draws = static_cast<std::size_t>(n);
        std::int64_t best_pair = -1;
        std::uint32_t best_speaker = 0;
        double best_sim = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < draws; ++i) {
          std::uint32_t imp;
          if (cfg.with_replacement) {
            std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
            imp = pool[d(rng)];
          } else {
            std::uniform_int_distribution<std::size_t> d(i, pool.size() - 1);
            std::swap(pool[i], pool[d(rng)]);
            imp = pool[i];
          }
          auto idx = table.pair_index(target, imp);
          if (idx < 0)
            throw Error("missing scores for pair (" + table.speakers()[target].str() +
                        ", " + table.speakers()[imp].str() + ")");
          double sim = pair_similarity(table.pairs()[static_cast<std::size_t>(idx)].scores);
          if (sim > best_sim || (sim == best_sim && imp < best_speaker)) {
            best_sim = sim;
            best_speaker = imp;
            best_pair = idx;
          }
        }
        selected[trial] = static_cast<std::size_t>(best_pair);
      },
      cfg.threads);
  return selected;
}

WorstCaseResult worst_case_fa_empirical(const PairScoreTable &table,
                                        const FaQuery &query,
                                        const SimConfig &cfg) {
  query.validate();
  auto selected = worst_case_selection(table, query.n, cfg);
  WorstCaseResult r;
  r.per_trial.reserve(selected.size());
  double sum = 0.0;
  for (std::size_t idx : selected) {
    double v = fa_rate(table.pairs()[idx].scores, query.tau);
    r.per_trial.push_back(v);
    sum += v;
  }
  r.p_fa = sum / static_cast<double>(selected.size());
  return r;
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw Error("quantile of an empty list");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  double pos = q * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

Interval bootstrap_ci(std::span<const double> per_trial, double level,
                      int resamples, Rng &rng) {
  if (per_trial.empty()) throw Error("bootstrap_ci: empty list");
  if (!(level > 0.0 && level < 1.0)) throw Error("bootstrap_ci: level must lie in (0, 1)");
  if (resamples < 1) throw Error("bootstrap_ci: resamples must be >= 1");
  const std::size_t n = per_trial.size();
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  // Means are accumulated relative to the smallest value so that a constant
  // list yields exactly that constant; the clamp only removes roundoff.
  const auto [lo_it, hi_it] = std::minmax_element(per_trial.begin(), per_trial.end());
  const double base = *lo_it, top = *hi_it;
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (auto &m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += per_trial[pick(rng)] - base;
    m = std::clamp(base + s / static_cast<double>(n), base, top);
  }
  double alpha = (1.0 - level) / 2.0;
  return Interval{quantile(means, alpha), quantile(means, 1.0 - alpha)};
}

FaCurveRow make_curve_row(std::int64_t n, double tau,
                          std::span<const double> per_trial,
                          const CiOptions &ci, Rng &rng) {
  FaCurveRow row;
  row.n = n;
  row.tau = tau;
  double s = 0.0;
  for (double v : per_trial) s += v;
  row.p_fa = std::clamp(s / static_cast<double>(per_trial.size()), 0.0, 1.0);
  auto iv = bootstrap_ci(per_trial, ci.level, ci.resamples, rng);
  row.ci_lo = std::clamp(std::min(iv.lo, row.p_fa), 0.0, 1.0);
  row.ci_hi = std::clamp(std::max(iv.hi, row.p_fa), 0.0, 1.0);
  return row;
}

FaCurve empirical_curve(const PairScoreTable &table,
                        std::span<const std::int64_t> n_grid,
                        std::span<const double> taus, const SimConfig &cfg,
                        const CiOptions &ci) {
  FaCurve curve;
  std::uint64_t row_index = 0;
  for (std::int64_t n : n_grid) {
    auto selected = worst_case_selection(table, n, cfg);
    for (double tau : taus) {
      FaQuery{n, tau}.validate();
      std::vector<double> per_trial;
      per_trial.reserve(selected.size());
      for (std::size_t idx : selected)
        per_trial.push_back(fa_rate(table.pairs()[idx].scores, tau));
      Rng rng = make_rng(cfg.seed, Stream::kBootstrap, row_index++);
      curve.rows.push_back(make_curve_row(n, tau, per_trial, ci, rng));
    }
  }
  return curve;
}

double detection_cost(std::span<const double> target_scores,
                      std::span<const double> nontarget_scores, double tau,
                      double c_miss, double c_fa, double p_target) {
  auto misses = std::count_if(target_scores.begin(), target_scores.end(),
                              [&](double s) { return !(s > tau); });
  auto fas = std::count_if(nontarget_scores.begin(), nontarget_scores.end(),
                           [&](double s) { return s > tau; });
  double p_miss = static_cast<double>(misses) / static_cast<double>(target_scores.size());
  double p_fa = static_cast<double>(fas) / static_cast<double>(nontarget_scores.size());
  return p_target * c_miss * p_miss + (1.0 - p_target) * c_fa * p_fa;
}

double min_dcf_threshold(std::span<const double> target_scores,
                         std::span<const double> nontarget_scores,
                         double c_miss, double c_fa, double p_target) {
  if (target_scores.empty() || nontarget_scores.empty())
    throw Error("min_dcf_threshold: both score lists must be non-empty");
  if (!(c_miss > 0.0) || !(c_fa > 0.0) || !(p_target > 0.0 && p_target < 1.0))
    throw Error("min_dcf_threshold: invalid costs or prior");

  std::vector<double> tar(target_scores.begin(), target_scores.end());
  std::vector<double> non(nontarget_scores.begin(), nontarget_scores.end());
  std::sort(tar.begin(), tar.end());
  std::sort(non.begin(), non.end());
  std::vector<double> pooled;
  pooled.reserve(tar.size() + non.size());
  std::merge(tar.begin(), tar.end(), non.begin(), non.end(), std::back_inserter(pooled));
  pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

  std::vector<double> candidates;
  candidates.reserve(pooled.size() + 1);
  candidates.push_back(-std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i + 1 < pooled.size(); ++i)
    candidates.push_back(0.5 * (pooled[i] + pooled[i + 1]));
  candidates.push_back(std::numeric_limits<double>::infinity());

  const double nt = static_cast<double>(tar.size());
  const double nn = static_cast<double>(non.size());
  double best_tau = candidates.front();
  double best_cost = std::numeric_limits<double>::infinity();
  for (double tau : candidates) {
    // Candidates ascend, so a strict improvement test keeps the smallest minimizer.
    double p_miss = static_cast<double>(std::upper_bound(tar.begin(), tar.end(), tau) - tar.begin()) / nt;
    double p_fa = static_cast<double>(non.end() - std::upper_bound(non.begin(), non.end(), tau)) / nn;
    double cost = p_target * c_miss * p_miss + (1.0 - p_target) * c_fa * p_fa;
    if (cost < best_cost) {
      best_cost = cost;
      best_tau = tau;
    }
  }
  return best_tau;
}

}  // namespace wcfa
