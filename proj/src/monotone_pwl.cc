// src/monotone_pwl.cc

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

#include "wcfa/monotone_pwl.h"

#include <cmath>

#include "wcfa/errors.h"
#include "wcfa/normal.h"

namespace wcfa {

std::string to_string(PwlDomain domain) {
  return domain == PwlDomain::kUnitInterval ? "unit-interval" : "real-line";
}

PwlDomain pwl_domain_from_string(const std::string &s) {
  if (s == "unit-interval") return PwlDomain::kUnitInterval;
  if (s == "real-line") return PwlDomain::kRealLine;
  throw Error("unknown piecewise-linear domain '" + s + "'");
}

double inverse_positive_increment(double increment) {
  double v = increment - kPwlSlopeFloor;
  if (!(v > 0.0)) throw Error("increment must exceed the slope floor");
  // softplus^{-1}(v) = log(expm1(v)), written to stay finite for large v.
  return v > 30.0 ? v + std::log1p(-std::exp(-v)) : std::log(std::expm1(v));
}

MonotonePwl::MonotonePwl(PwlDomain domain, std::vector<double> knot_inputs,
                         std::vector<double> raw_offsets)
    : domain_(domain), knots_(std::move(knot_inputs)), raw_(std::move(raw_offsets)) {
  if (knots_.size() < 2) throw Error("piecewise-linear function needs >= 2 knots");
  for (std::size_t k = 1; k < knots_.size(); ++k)
    if (!(knots_[k] > knots_[k - 1]))
      throw Error("knot inputs must be strictly increasing");
  if (raw_.size() != knots_.size())
    throw Error("raw offsets: expected " + std::to_string(knots_.size()) +
                " values, got " + std::to_string(raw_.size()));
  for (double r : raw_)
    if (!std::isfinite(r)) throw Error("raw offsets must be finite");
  values_ = constrain_params<double>(raw_);
}

std::vector<double> MonotonePwl::uniform_knots(double lo, double hi, int segments) {
  if (segments < 1 || !(hi > lo)) throw Error("invalid knot grid");
  std::vector<double> x(static_cast<std::size_t>(segments) + 1);
  for (int k = 0; k <= segments; ++k)
    x[k] = lo + (hi - lo) * static_cast<double>(k) / segments;
  x.back() = hi;
  return x;
}

MonotonePwl MonotonePwl::identity(double lo, double hi, int segments) {
  auto x = uniform_knots(lo, hi, segments);
  std::vector<double> raw(x.size());
  raw[0] = x[0];
  for (std::size_t k = 1; k < x.size(); ++k)
    raw[k] = inverse_positive_increment(x[k] - x[k - 1]);
  return MonotonePwl(PwlDomain::kRealLine, std::move(x), std::move(raw));
}

MonotonePwl MonotonePwl::normal_quantile(int segments) {
  if (segments < 2) throw Error("normal quantile needs >= 2 segments");
  auto x = uniform_knots(0.0, 1.0, segments);
  std::vector<double> y(x.size());
  for (std::size_t k = 1; k + 1 < x.size(); ++k) y[k] = wcfa::normal_quantile(x[k]);
  // Segment [0, h] is linear, so its mean is (y_0 + y_1) / 2; match it to
  // E[Z | Z < z_h] = -pdf(z_h) / h.
  const double h = x[1];
  const double z_h = y[1];
  y[0] = 2.0 * (-normal_pdf(z_h) / h) - z_h;
  y.back() = -y[0];
  std::vector<double> raw(x.size());
  raw[0] = y[0];
  for (std::size_t k = 1; k < x.size(); ++k)
    raw[k] = inverse_positive_increment(y[k] - y[k - 1]);
  return MonotonePwl(PwlDomain::kUnitInterval, std::move(x), std::move(raw));
}

double MonotonePwl::operator()(double x) const {
  if (domain_ == PwlDomain::kUnitInterval && !(x > 0.0 && x < 1.0))
    throw Error("quantile argument must lie in (0, 1)");
  return pwl_eval<double>(knots_, values_, x);
}

double MonotonePwl::inverse(double y) const {
  const std::size_t last = values_.size() - 1;
  if (domain_ == PwlDomain::kUnitInterval) {
    if (y <= values_[0]) return knots_[0];
    if (y >= values_[last]) return knots_[last];
  }
  auto it = std::upper_bound(values_.begin() + 1, values_.end() - 1, y);
  std::size_t i = static_cast<std::size_t>(it - values_.begin()) - 1;
  double slope = (values_[i + 1] - values_[i]) / (knots_[i + 1] - knots_[i]);
  return knots_[i] + (y - values_[i]) / slope;
}

std::vector<double> MonotonePwl::raw_gradient(double x) const {
  const std::size_t i = pwl_segment(knots_, x);
  const double t = (x - knots_[i]) / (knots_[i + 1] - knots_[i]);
  std::vector<double> g(raw_.size(), 0.0);
  // y_j = raw_0 + sum_{k<=j} pos(raw_k); f = (1 - t) y_i + t y_{i+1}.
  g[0] = 1.0;
  for (std::size_t k = 1; k < raw_.size(); ++k) {
    double dpos = ad::sigmoid(raw_[k]);
    double w = k <= i ? 1.0 : (k == i + 1 ? t : 0.0);
    g[k] = w * dpos;
  }
  return g;
}

}  // namespace wcfa
