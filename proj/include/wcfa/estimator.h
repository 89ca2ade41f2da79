// wcfa/estimator.h

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

#ifndef WCFA_ESTIMATOR_H_
#define WCFA_ESTIMATOR_H_

#include <cstdint>
#include <span>
#include <vector>

#include "wcfa/fa_curve.h"
#include "wcfa/parallel.h"
#include "wcfa/score_table.h"

namespace wcfa {

/// Worst-case query: N impostors, detection threshold tau.
struct FaQuery {
  std::int64_t n = 1;
  double tau = 0.0;

  void validate() const;
};

struct SimConfig {
  std::int64_t trials = 1000;
  std::uint64_t seed = 0;
  bool with_replacement = false;
  int threads = 0;  // <= 0: default_threads()

  void validate() const;
};

/// Fraction of scores strictly above tau.
double fa_rate(const ScoreSet &scores, double tau);

/// Speaker-pair similarity: the mean score.
inline double pair_similarity(const ScoreSet &scores) { return scores.mean(); }

/// Average of per-pair FA rates, each pair weighted equally.
double zero_effort_fa(const PairScoreTable &table, double tau);

/// For each of cfg.trials independent trials: draw a target uniformly from
/// table.targets(), draw N impostors among the other speakers, and keep the
/// pair with the largest similarity (ties -> smallest speaker token).
/// Returns the selected pair index per trial. Trial i uses its own random
/// stream derived from (cfg.seed, i), and impostors are drawn as the prefix
/// of a partial Fisher-Yates shuffle, so with a common seed the candidate
/// set for N' > N contains the set for N.
std::vector<std::size_t> worst_case_selection(const PairScoreTable &table,
                                              std::int64_t n,
                                              const SimConfig &cfg);

struct WorstCaseResult {
  double p_fa = 0.0;
  std::vector<double> per_trial;
};

WorstCaseResult worst_case_fa_empirical(const PairScoreTable &table,
                                        const FaQuery &query,
                                        const SimConfig &cfg);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Percentile bootstrap of the mean: `resamples` resamples with replacement,
/// returning the (1-level)/2 and 1-(1-level)/2 quantiles of resample means.
Interval bootstrap_ci(std::span<const double> per_trial, double level,
                      int resamples, Rng &rng);

struct CiOptions {
  double level = 0.99;
  int resamples = 1000;
};

/// Builds a curve row from per-trial values, clamping the interval so that
/// it brackets the point estimate.
FaCurveRow make_curve_row(std::int64_t n, double tau,
                          std::span<const double> per_trial,
                          const CiOptions &ci, Rng &rng);

/// Empirical worst-case curve over the N grid x tau list; the trials for a
/// given N are shared by all thresholds.
FaCurve empirical_curve(const PairScoreTable &table,
                        std::span<const std::int64_t> n_grid,
                        std::span<const double> taus, const SimConfig &cfg,
                        const CiOptions &ci = {});

/// Threshold minimizing p_target*c_miss*P_miss + (1-p_target)*c_fa*P_fa
/// (accept when score > tau) over the midpoints of adjacent distinct pooled
/// scores and the two infinite sentinels; the smallest minimizer wins.
double min_dcf_threshold(std::span<const double> target_scores,
                         std::span<const double> nontarget_scores,
                         double c_miss, double c_fa, double p_target);

/// Detection cost at tau with the same conventions as min_dcf_threshold.
double detection_cost(std::span<const double> target_scores,
                      std::span<const double> nontarget_scores, double tau,
                      double c_miss, double c_fa, double p_target);

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::span<const double> values, double q);

}  // namespace wcfa

#endif  // WCFA_ESTIMATOR_H_
