// wcfa/synthetic.h

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

#ifndef WCFA_SYNTHETIC_H_
#define WCFA_SYNTHETIC_H_

// Synthetic score tables drawn from a known generator, and reference
// worst-case curves computed directly from that generator.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>

#include "wcfa/estimator.h"
#include "wcfa/fa_curve.h"
#include "wcfa/loc_scale.h"
#include "wcfa/plda.h"
#include "wcfa/score_model.h"
#include "wcfa/score_table.h"

namespace wcfa {

struct GroundTruth {
  std::variant<LocScaleParams, PldaScoreParams> model;
  std::int64_t n_speakers = 2;
  int scores_per_pair = 1;
  std::uint64_t seed = 0;

  void validate() const;
  ScoreModel score_model() const;
};

/// Accepted forms:
///   {"family": "plda", "d": [...], ...}
///   {"family": "gaussian-ls", "hyper_mean": [m, s], "hyper_cov": [[..],[..]], ...}
///   {"model": <model artifact>, ...}
/// each with "n_speakers", "scores_per_pair" and optional "seed".
GroundTruth ground_truth_from_json(const std::string &text);
GroundTruth load_ground_truth(const std::filesystem::path &path);

/// PLDA: one latent per speaker, then fresh features for every score of
/// every ordered pair. Location-scale: one (mu, sigma) per ordered pair.
PairScoreTable generate_synthetic_table(const GroundTruth &gt, int threads = 0);

/// Worst-case curve simulated from the generator itself, with a fresh
/// speaker population in every trial.
FaCurve oracle_curve(const GroundTruth &gt, std::span<const std::int64_t> n_grid,
                     std::span<const double> taus, std::int64_t trials,
                     std::uint64_t seed, const CiOptions &ci = {},
                     int threads = 0);

}  // namespace wcfa

#endif  // WCFA_SYNTHETIC_H_
