// wcfa/adam.h

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

#ifndef WCFA_ADAM_H_
#define WCFA_ADAM_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wcfa {

struct ParamSegment {
  std::string name;
  std::size_t offset = 0;
  std::size_t length = 0;
};

/// Flat vector of unconstrained parameters with named slices. The slices
/// cover the vector exactly, in order, without overlap.
struct ParamVector {
  std::vector<double> values;
  std::vector<ParamSegment> segments;

  void validate() const;
  const ParamSegment *find(const std::string &name) const;
  std::span<const double> segment(const std::string &name) const;
};

/// Adam (Kingma & Ba) with bias-corrected moment estimates.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(std::size_t n = 0, double learning_rate = 1e-3)
      : m(n, 0.0), v(n, 0.0), lr(learning_rate) {}
};

void adam_step(AdamState &state, std::span<double> params,
               std::span<const double> grad);

}  // namespace wcfa

#endif  // WCFA_ADAM_H_
