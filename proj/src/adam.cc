// src/adam.cc

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

#include "wcfa/adam.h"

#include <cmath>

#include "wcfa/errors.h"

namespace wcfa {

void ParamVector::validate() const {
  std::size_t next = 0;
  for (const auto &s : segments) {
    if (s.offset != next)
      throw Error("parameter segment '" + s.name + "' leaves a gap or overlaps");
    next += s.length;
  }
  if (next != values.size())
    throw Error("parameter segments cover " + std::to_string(next) +
                " values but the vector has " + std::to_string(values.size()));
}

const ParamSegment *ParamVector::find(const std::string &name) const {
  for (const auto &s : segments)
    if (s.name == name) return &s;
  return nullptr;
}

std::span<const double> ParamVector::segment(const std::string &name) const {
  const auto *s = find(name);
  if (s == nullptr) throw Error("no parameter segment named '" + name + "'");
  return std::span<const double>(values).subspan(s->offset, s->length);
}

void adam_step(AdamState &state, std::span<double> params,
               std::span<const double> grad) {
  if (params.size() != grad.size() || state.m.size() != params.size() ||
      state.v.size() != params.size())
    throw Error("adam_step: shape mismatch");
  ++state.t;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    double m_hat = state.m[i] / bc1;
    double v_hat = state.v[i] / bc2;
    params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

}  // namespace wcfa
