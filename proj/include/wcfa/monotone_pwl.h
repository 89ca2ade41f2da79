// wcfa/monotone_pwl.h

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

#ifndef WCFA_MONOTONE_PWL_H_
#define WCFA_MONOTONE_PWL_H_

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "wcfa/autodiff.h"

namespace wcfa {

enum class PwlDomain {
  kUnitInterval,  // quantile functions, evaluated on (0, 1) only
  kRealLine,      // score warps, extrapolated linearly past the end knots
};

std::string to_string(PwlDomain domain);
PwlDomain pwl_domain_from_string(const std::string &s);

inline constexpr double kPwlSlopeFloor = 1e-6;
inline constexpr int kDefaultPwlSegments = 16;

/// Smooth map from an unconstrained raw value to a knot increment > 0.
template <class S>
S positive_increment(const S &raw) {
  return ad::softplus(raw) + kPwlSlopeFloor;
}
double inverse_positive_increment(double increment);

/// Realized knot values: y_0 = raw_0, y_k = y_{k-1} + positive_increment(raw_k).
template <class S>
std::vector<S> constrain_params(std::span<const S> raw) {
  std::vector<S> y;
  y.reserve(raw.size());
  if (raw.empty()) return y;
  y.push_back(raw[0]);
  for (std::size_t k = 1; k < raw.size(); ++k)
    y.push_back(y.back() + positive_increment(raw[k]));
  return y;
}

/// Index i of the segment [x_i, x_{i+1}] used for x; inputs beyond the ends
/// map to the boundary segments.
inline std::size_t pwl_segment(std::span<const double> knots, double x) {
  auto it = std::upper_bound(knots.begin() + 1, knots.end() - 1, x);
  return static_cast<std::size_t>(it - knots.begin()) - 1;
}

/// y = (1 - t) y_i + t y_{i+1} with t = (x - x_i) / (x_{i+1} - x_i). Outside
/// the knot range the boundary segment is continued linearly.
template <class S>
S pwl_eval(std::span<const double> knots, std::span<const S> values,
           const S &x) {
  const double xv = ad::value_of(x);
  const std::size_t i = pwl_segment(knots, xv);
  const double h = knots[i + 1] - knots[i];
  const double t = (xv - knots[i]) / h;
  const double y0 = ad::value_of(values[i]), y1 = ad::value_of(values[i + 1]);
  ad::Node<S> node((1.0 - t) * y0 + t * y1);
  if constexpr (ad::is_var_v<S>) {
    node.add(x, (y1 - y0) / h);
    node.add(values[i], 1.0 - t);
    node.add(values[i + 1], t);
  }
  return node.finish();
}

/// Monotone non-decreasing piecewise-linear function on a fixed knot grid.
class MonotonePwl {
 public:
  MonotonePwl(PwlDomain domain, std::vector<double> knot_inputs,
              std::vector<double> raw_offsets);

  /// Identity map on [lo, hi] with `segments` equal segments.
  static MonotonePwl identity(double lo, double hi,
                              int segments = kDefaultPwlSegments);
  /// Standard normal quantile on an even grid over [0, 1]. The two end knots,
  /// where the quantile is infinite, take the value that preserves the
  /// normal's conditional mean over the end segment.
  static MonotonePwl normal_quantile(int segments = kDefaultPwlSegments);
  static std::vector<double> uniform_knots(double lo, double hi, int segments);

  /// Throws if x is outside (0, 1) for the unit-interval domain.
  double operator()(double x) const;
  double inverse(double y) const;
  /// d f(x) / d raw_offsets.
  std::vector<double> raw_gradient(double x) const;

  PwlDomain domain() const { return domain_; }
  std::size_t segments() const { return knots_.size() - 1; }
  const std::vector<double> &knot_inputs() const { return knots_; }
  const std::vector<double> &raw_offsets() const { return raw_; }
  const std::vector<double> &knot_values() const { return values_; }

 private:
  PwlDomain domain_;
  std::vector<double> knots_;
  std::vector<double> raw_;
  std::vector<double> values_;
};

}  // namespace wcfa

#endif  // WCFA_MONOTONE_PWL_H_
