// src/autodiff.cc

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

#include "wcfa/autodiff.h"

#include <algorithm>
#include <stdexcept>

#include "wcfa/errors.h"

namespace wcfa::ad {

namespace {
thread_local Tape *g_active = nullptr;

Tape &require_tape() {
  if (g_active == nullptr)
    throw Error("autodiff: a recorded variable was used without an active tape");
  return *g_active;
}
}  // namespace

Tape *Tape::active() { return g_active; }

std::int32_t Tape::new_input() {
  edge_end_.push_back(parent_.size());
  return static_cast<std::int32_t>(edge_end_.size() - 1);
}

void Tape::clear() {
  edge_end_.clear();
  parent_.clear();
  partial_.clear();
}

std::vector<double> Tape::adjoints(std::int32_t output) const {
  std::vector<double> adj(size(), 0.0);
  if (output < 0) return adj;
  if (static_cast<std::size_t>(output) >= size())
    throw Error("autodiff: output variable does not belong to this tape");
  adj[output] = 1.0;
  for (std::int64_t i = output; i >= 0; --i) {
    double a = adj[i];
    if (a == 0.0) continue;
    std::uint64_t begin = i == 0 ? 0 : edge_end_[i - 1];
    for (std::uint64_t e = begin; e < edge_end_[i]; ++e)
      adj[parent_[e]] += a * partial_[e];
  }
  return adj;
}

ActiveTape::ActiveTape(Tape &tape) : previous_(g_active) { g_active = &tape; }
ActiveTape::~ActiveTape() { g_active = previous_; }

NodeBuilder::NodeBuilder(double value) : tape_(g_active), value_(value) {}

void NodeBuilder::add(const Var &parent, double partial) {
  if (parent.is_constant() || partial == 0.0) return;
  if (tape_ == nullptr) tape_ = &require_tape();
  if (static_cast<std::size_t>(parent.id) >= tape_->size())
    throw Error("autodiff: variable from a different tape");
  tape_->parent_.push_back(parent.id);
  tape_->partial_.push_back(partial);
  any_ = true;
}

Var NodeBuilder::finish() {
  if (!any_) return Var(value_);
  tape_->edge_end_.push_back(tape_->parent_.size());
  return Var(value_, static_cast<std::int32_t>(tape_->edge_end_.size() - 1));
}

Var unary(const Var &x, double value, double partial) {
  if (x.is_constant()) return Var(value);
  NodeBuilder n(value);
  n.add(x, partial);
  return n.finish();
}

Var binary(const Var &x, double dx, const Var &y, double dy, double value) {
  if (x.is_constant() && y.is_constant()) return Var(value);
  NodeBuilder n(value);
  n.add(x, dx);
  n.add(y, dy);
  return n.finish();
}

Var weighted_sum(std::span<const Var> xs, std::span<const double> weights) {
  if (xs.size() != weights.size())
    throw Error("weighted_sum: size mismatch");
  double v = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) v += weights[i] * xs[i].value;
  NodeBuilder n(v);
  for (std::size_t i = 0; i < xs.size(); ++i) n.add(xs[i], weights[i]);
  return n.finish();
}

Var sum(std::span<const Var> xs) {
  double v = 0.0;
  for (const auto &x : xs) v += x.value;
  NodeBuilder n(v);
  for (const auto &x : xs) n.add(x, 1.0);
  return n.finish();
}

ValueAndGrad value_and_grad(const Objective &f, std::span<const double> x) {
  Tape tape;
  ActiveTape scope(tape);
  std::vector<Var> inputs;
  inputs.reserve(x.size());
  for (double xi : x) inputs.emplace_back(xi, tape.new_input());
  Var out = f(inputs);
  ValueAndGrad r;
  r.value = out.value;
  r.grad.assign(x.size(), 0.0);
  if (!out.is_constant()) {
    auto adj = tape.adjoints(out.id);
    std::copy(adj.begin(), adj.begin() + static_cast<std::ptrdiff_t>(x.size()),
              r.grad.begin());
  }
  return r;
}

GradCheckReport finite_difference_check(
    const Objective &f, std::span<const double> x, double epsilon,
    double tolerance,
    const std::function<double(std::span<const double>)> &value_fn,
    double abs_floor) {
  if (!(epsilon > 0.0)) throw Error("finite_difference_check: epsilon must be > 0");
  GradCheckReport report;
  report.analytic = value_and_grad(f, x).grad;
  auto eval = [&](std::span<const double> p) {
    if (value_fn) return value_fn(p);
    return value_and_grad(f, p).value;
  };
  std::vector<double> p(x.begin(), x.end());
  report.numeric.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    p[i] = x[i] + epsilon;
    double up = eval(p);
    p[i] = x[i] - epsilon;
    double down = eval(p);
    p[i] = x[i];
    report.numeric[i] = (up - down) / (2.0 * epsilon);
    double a = report.analytic[i], n = report.numeric[i];
    double denom = std::max({std::abs(a), std::abs(n), abs_floor});
    double rel = std::abs(a - n) / denom;
    if (std::isnan(rel)) rel = INFINITY;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_index = i;
    }
  }
  report.passed = report.max_rel_error < tolerance;
  return report;
}

}  // namespace wcfa::ad
