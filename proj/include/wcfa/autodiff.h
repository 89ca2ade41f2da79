// wcfa/autodiff.h

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

#ifndef WCFA_AUTODIFF_H_
#define WCFA_AUTODIFF_H_

// Scalar reverse-mode differentiation over a recorded tape.
//
// A Var is a value plus the id of the tape node that produced it; constants
// carry id -1 and never touch the tape. Each node stores the local partial
// derivatives with respect to its parents, so model code can record either
// elementary operations (operator overloads below) or fused kernels with
// many parents (NodeBuilder). The tape in use is thread-local: every thread
// differentiates its own computation.
//
// Model code is written once as templates over the scalar type S, where S is
// either double (plain evaluation) or Var (recorded evaluation).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <type_traits>
#include <vector>

namespace wcfa::ad {

class Tape {
 public:
  /// Appends a node with no parents (an independent variable).
  std::int32_t new_input();
  std::size_t size() const { return edge_end_.size(); }
  /// Reverse sweep from `output`; returns the adjoint of every node.
  std::vector<double> adjoints(std::int32_t output) const;
  void clear();

  /// Tape active on the calling thread, or nullptr.
  static Tape *active();

 private:
  friend class ActiveTape;
  friend class NodeBuilder;

  std::vector<std::uint64_t> edge_end_;  // node i owns edges [end[i-1], end[i])
  std::vector<std::int32_t> parent_;
  std::vector<double> partial_;
};

/// Makes `tape` the active tape of this thread for the scope's lifetime.
class ActiveTape {
 public:
  explicit ActiveTape(Tape &tape);
  ~ActiveTape();
  ActiveTape(const ActiveTape &) = delete;
  ActiveTape &operator=(const ActiveTape &) = delete;

 private:
  Tape *previous_;
};

struct Var {
  double value = 0.0;
  std::int32_t id = -1;

  Var() = default;
  Var(double v) : value(v) {}  // NOLINT: constants convert implicitly
  Var(double v, std::int32_t node) : value(v), id(node) {}
  bool is_constant() const { return id < 0; }
};

/// Records one node whose parents are added one at a time. No other node may
/// be created on the same tape between construction and finish().
class NodeBuilder {
 public:
  explicit NodeBuilder(double value);
  void add(const Var &parent, double partial);
  Var finish();

 private:
  Tape *tape_;
  double value_;
  bool any_ = false;
};

inline double value_of(double x) { return x; }
inline double value_of(const Var &x) { return x.value; }

template <class S>
inline constexpr bool is_var_v = std::is_same_v<std::remove_cvref_t<S>, Var>;

/// Scalar-generic node construction: a no-op for double, a NodeBuilder for Var.
template <class S>
class Node;

template <>
class Node<double> {
 public:
  explicit Node(double value) : value_(value) {}
  void add(double, double) {}
  double finish() { return value_; }

 private:
  double value_;
};

template <>
class Node<Var> {
 public:
  explicit Node(double value) : builder_(value) {}
  void add(const Var &parent, double partial) { builder_.add(parent, partial); }
  Var finish() { return builder_.finish(); }

 private:
  NodeBuilder builder_;
};

Var unary(const Var &x, double value, double partial);
Var binary(const Var &x, double dx, const Var &y, double dy, double value);

inline Var operator+(const Var &x, const Var &y) {
  return binary(x, 1.0, y, 1.0, x.value + y.value);
}
inline Var operator-(const Var &x, const Var &y) {
  return binary(x, 1.0, y, -1.0, x.value - y.value);
}
inline Var operator*(const Var &x, const Var &y) {
  return binary(x, y.value, y, x.value, x.value * y.value);
}
inline Var operator/(const Var &x, const Var &y) {
  double q = x.value / y.value;
  return binary(x, 1.0 / y.value, y, -q / y.value, q);
}
inline Var operator+(const Var &x, double c) { return unary(x, x.value + c, 1.0); }
inline Var operator+(double c, const Var &x) { return x + c; }
inline Var operator-(const Var &x, double c) { return unary(x, x.value - c, 1.0); }
inline Var operator-(double c, const Var &x) { return unary(x, c - x.value, -1.0); }
inline Var operator*(const Var &x, double c) { return unary(x, x.value * c, c); }
inline Var operator*(double c, const Var &x) { return x * c; }
inline Var operator/(const Var &x, double c) { return unary(x, x.value / c, 1.0 / c); }
inline Var operator/(double c, const Var &x) {
  return unary(x, c / x.value, -c / (x.value * x.value));
}
inline Var operator-(const Var &x) { return unary(x, -x.value, -1.0); }
inline Var &operator+=(Var &x, const Var &y) { return x = x + y; }
inline Var &operator-=(Var &x, const Var &y) { return x = x - y; }
inline Var &operator*=(Var &x, const Var &y) { return x = x * y; }
inline Var &operator/=(Var &x, const Var &y) { return x = x / y; }

inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}
inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}
/// Unit step 1{x > 0}; its derivative is taken as zero everywhere.
inline double heaviside(double x) { return x > 0.0 ? 1.0 : 0.0; }
inline double square(double x) { return x * x; }

inline Var exp(const Var &x) {
  double e = std::exp(x.value);
  return unary(x, e, e);
}
inline Var log(const Var &x) { return unary(x, std::log(x.value), 1.0 / x.value); }
inline double log1p(double x) { return std::log1p(x); }
inline Var log1p(const Var &x) {
  return unary(x, std::log1p(x.value), 1.0 / (1.0 + x.value));
}
inline Var sqrt(const Var &x) {
  double r = std::sqrt(x.value);
  return unary(x, r, 0.5 / r);
}
inline Var square(const Var &x) { return unary(x, x.value * x.value, 2.0 * x.value); }
inline Var softplus(const Var &x) {
  return unary(x, softplus(x.value), sigmoid(x.value));
}
inline Var sigmoid(const Var &x) {
  double s = sigmoid(x.value);
  return unary(x, s, s * (1.0 - s));
}
inline Var heaviside(const Var &x) { return Var(heaviside(x.value)); }

/// Weighted sum sum_i w_i x_i recorded as a single node.
Var weighted_sum(std::span<const Var> xs, std::span<const double> weights);
Var sum(std::span<const Var> xs);
inline double sum(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s;
}

struct ValueAndGrad {
  double value = 0.0;
  std::vector<double> grad;
};

using Objective = std::function<Var(std::span<const Var>)>;

/// Evaluates f at x on a fresh tape and returns f(x) and df/dx. f must draw
/// any randomness from state fixed outside the call so that repeated calls
/// are deterministic.
ValueAndGrad value_and_grad(const Objective &f, std::span<const double> x);

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  bool passed = false;
  std::vector<double> analytic;
  std::vector<double> numeric;
};

/// Compares reverse-mode gradients with central differences
/// (f(x + eps e_i) - f(x - eps e_i)) / (2 eps). The relative error of a
/// coordinate is |a - n| / max(|a|, |n|, abs_floor).
GradCheckReport finite_difference_check(
    const Objective &f, std::span<const double> x, double epsilon,
    double tolerance,
    const std::function<double(std::span<const double>)> &value_fn = nullptr,
    double abs_floor = 1e-6);

}  // namespace wcfa::ad

#endif  // WCFA_AUTODIFF_H_
