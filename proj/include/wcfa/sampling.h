// wcfa/sampling.h

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

#ifndef WCFA_SAMPLING_H_
#define WCFA_SAMPLING_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace wcfa {

/// Closest-impostor selection rule: hard argmax, or softmax(beta * sim)
/// weighting of the candidates.
struct Selection {
  enum class Kind { kHard, kSoft };
  Kind kind = Kind::kHard;
  double beta = 0.0;

  static Selection hard() { return {}; }
  static Selection soft(double beta) { return {Kind::kSoft, beta}; }
  bool is_hard() const { return kind == Kind::kHard; }
};

/// Every random draw consumed by one simulated trial, so that a trial can be
/// replayed exactly (common random numbers).
struct TrialNoise {
  std::int64_t n = 0;            // impostor candidates
  int l = 0;                     // scores emitted for the selected pair
  std::vector<double> latent;    // per-candidate (and target) draws
  std::vector<double> score;     // per-score draws
};

inline std::vector<double> softmax(std::span<const double> z, double beta) {
  std::vector<double> w(z.size());
  double top = -std::numeric_limits<double>::infinity();
  for (double v : z) top = std::max(top, beta * v);
  double total = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    w[j] = std::exp(beta * z[j] - top);
    total += w[j];
  }
  for (double &v : w) v /= total;
  return w;
}

/// Index of the largest value; ties go to the lowest index.
inline std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < v.size(); ++j)
    if (v[j] > v[best]) best = j;
  return best;
}

}  // namespace wcfa

#endif  // WCFA_SAMPLING_H_
