// tests/unit/test_monotone_pwl.cc

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

#include <cmath>
#include <random>

#include "doctest.h"
#include "wcfa/autodiff.h"
#include "wcfa/errors.h"
#include "wcfa/monotone_pwl.h"
#include "wcfa/normal.h"

using namespace wcfa;

namespace {

// raw offsets realizing the given (strictly increasing) knot values.
std::vector<double> raw_for(const std::vector<double> &y) {
  std::vector<double> raw(y.size());
  raw[0] = y[0];
  for (std::size_t k = 1; k < y.size(); ++k) raw[k] = inverse_positive_increment(y[k] - y[k - 1]);
  return raw;
}

MonotonePwl three_knot(PwlDomain d) {
  return MonotonePwl(d, {0.0, 0.5, 1.0}, raw_for({-1.0, 0.0, 1.0}));
}

MonotonePwl random_pwl(std::mt19937_64 &rng, PwlDomain d) {
  std::normal_distribution<double> normal;
  int segs = 1 + static_cast<int>(rng() % 20);
  auto x = d == PwlDomain::kUnitInterval ? MonotonePwl::uniform_knots(0, 1, segs)
                                         : MonotonePwl::uniform_knots(-3 + normal(rng), 3 + std::abs(normal(rng)), segs);
  std::vector<double> raw(x.size());
  for (double &r : raw) r = 2.0 * normal(rng);
  return MonotonePwl(d, x, raw);
}

}  // namespace

TEST_CASE("evaluation interpolates between knots") {
  auto f = three_knot(PwlDomain::kRealLine);
  CHECK(f(0.25) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(f(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f(0.0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(f(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  // Linear extrapolation with the boundary slopes.
  CHECK(f(1.5) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f(-0.5) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("unit-interval functions only accept (0, 1)") {
  auto f = three_knot(PwlDomain::kUnitInterval);
  CHECK(f(0.25) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK_THROWS_AS(f(0.0), Error);
  CHECK_THROWS_AS(f(1.0), Error);
  CHECK_THROWS_AS(f(-0.1), Error);
  CHECK_THROWS_AS(f(NAN), Error);
  // Inversion clamps to the knot range.
  CHECK(f.inverse(-5.0) == 0.0);
  CHECK(f.inverse(5.0) == 1.0);
}

TEST_CASE("identity initialization is the identity everywhere") {
  auto f = MonotonePwl::identity(-4.0, 4.0, 16);
  for (double x = -10.0; x <= 10.0; x += 0.37) CHECK(f(x) == doctest::Approx(x).epsilon(1e-9));
  CHECK(f.domain() == PwlDomain::kRealLine);
  CHECK(f.segments() == 16);
}

TEST_CASE("inverse examples") {
  auto f = three_knot(PwlDomain::kRealLine);
  CHECK(f.inverse(-0.5) == doctest::Approx(0.25).epsilon(1e-12));
  // Beyond the last knot value: slope 2 on [0.5, 1], so 1 + (2 - 1) / 2.
  CHECK(f.inverse(2.0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(f.inverse(-3.0) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("constructor checks") {
  CHECK_THROWS_AS(MonotonePwl(PwlDomain::kRealLine, {0.0}, {0.0}), Error);
  CHECK_THROWS_AS(MonotonePwl(PwlDomain::kRealLine, {0.0, 1.0}, {0.0}), Error);
  CHECK_THROWS_AS(MonotonePwl(PwlDomain::kRealLine, {1.0, 0.0}, {0.0, 0.0}), Error);
  CHECK_THROWS_AS(MonotonePwl(PwlDomain::kRealLine, {0.0, 1.0}, {0.0, NAN}), Error);
  CHECK_THROWS_AS(pwl_domain_from_string("circle"), Error);
  CHECK(pwl_domain_from_string(to_string(PwlDomain::kUnitInterval)) == PwlDomain::kUnitInterval);
}

TEST_CASE("constant increments give a uniform slope") {
  const double delta = 0.3;
  auto x = MonotonePwl::uniform_knots(0.0, 2.0, 8);
  std::vector<double> raw(x.size(), inverse_positive_increment(delta));
  raw[0] = 1.0;
  MonotonePwl f(PwlDomain::kRealLine, x, raw);
  const auto &y = f.knot_values();
  for (std::size_t k = 1; k < y.size(); ++k)
    CHECK((y[k] - y[k - 1]) / (x[k] - x[k - 1]) == doctest::Approx(delta / 0.25).epsilon(1e-12));
}

TEST_CASE("property: realized values strictly increase and the first raw value translates") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  for (int inst = 0; inst < 1000; ++inst) {
    std::vector<double> raw(2 + rng() % 30);
    for (double &r : raw) r = 10.0 * normal(rng);
    auto y = constrain_params<double>(raw);
    for (std::size_t k = 1; k < y.size(); ++k) REQUIRE(y[k] > y[k - 1]);
    auto shifted = raw;
    double c = normal(rng);
    shifted[0] += c;
    auto z = constrain_params<double>(shifted);
    for (std::size_t k = 0; k < y.size(); ++k)
      REQUIRE(std::abs(z[k] - (y[k] + c)) <= 1e-12 * std::max(1.0, std::abs(y[k])));
  }
}

TEST_CASE("property: evaluation is strictly increasing") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unif(-6.0, 6.0);
  for (int inst = 0; inst < 1000; ++inst) {
    auto f = random_pwl(rng, PwlDomain::kRealLine);
    double a = unif(rng), b = unif(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    REQUIRE(f(a) < f(b));
  }
}

TEST_CASE("property: inverse undoes evaluation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int inst = 0; inst < 1000; ++inst) {
    auto f = random_pwl(rng, PwlDomain::kRealLine);
    double x = -8.0 + 16.0 * unif(rng);
    REQUIRE(std::abs(f.inverse(f(x)) - x) <= 1e-10 * std::max(1.0, std::abs(x)));
    auto g = random_pwl(rng, PwlDomain::kUnitInterval);
    double u = 1e-6 + (1 - 2e-6) * unif(rng);
    REQUIRE(std::abs(g.inverse(g(u)) - u) <= 1e-10);
  }
}

TEST_CASE("property: raw-parameter gradient matches central differences away from knots") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int inst = 0; inst < 1000; ++inst) {
    auto f = random_pwl(rng, PwlDomain::kRealLine);
    const auto &x = f.knot_inputs();
    double at = x.front() - 1.0 + (x.back() - x.front() + 2.0) * unif(rng);
    auto g = f.raw_gradient(at);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double h = 1e-6;
      auto rp = f.raw_offsets(), rm = f.raw_offsets();
      rp[k] += h;
      rm[k] -= h;
      double num = (MonotonePwl(f.domain(), x, rp)(at) - MonotonePwl(f.domain(), x, rm)(at)) / (2 * h);
      REQUIRE(std::abs(num - g[k]) <= 1e-5 * std::max({std::abs(num), std::abs(g[k]), 1e-3}));
    }
  }
}

TEST_CASE("tape gradient of the evaluation matches the closed form") {
  auto f = three_knot(PwlDomain::kRealLine);
  std::vector<double> theta = {0.3, -1.0, inverse_positive_increment(1.0), inverse_positive_increment(1.0)};
  ad::Objective obj = [&](std::span<const ad::Var> p) {
    auto y = constrain_params<ad::Var>(p.subspan(1));
    return pwl_eval<ad::Var>(f.knot_inputs(), y, p[0]);
  };
  auto vg = ad::value_and_grad(obj, theta);
  CHECK(vg.value == doctest::Approx(f(0.3)).epsilon(1e-12));
  CHECK(vg.grad[0] == doctest::Approx(2.0).epsilon(1e-9));  // slope of [0, 0.5]
  auto rg = f.raw_gradient(0.3);
  for (std::size_t k = 0; k < rg.size(); ++k)
    CHECK(vg.grad[k + 1] == doctest::Approx(rg[k]).epsilon(1e-12));
}

TEST_CASE("normal-quantile initialization") {
  auto q = MonotonePwl::normal_quantile(16);
  const auto &x = q.knot_inputs();
  const auto &y = q.knot_values();
  for (std::size_t k = 1; k + 1 < x.size(); ++k)
    CHECK(y[k] == doctest::Approx(normal_quantile(x[k])).epsilon(1e-9));
  CHECK(q(0.5) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(y.front() == doctest::Approx(-y.back()).epsilon(1e-9));

  // End segment mean equals E[Z | Z < z_h], by trapezoid integration of
  // z * pdf(z) over (-12, z_h).
  const double h = x[1], zh = normal_quantile(h);
  double integral = 0.0;
  const int steps = 200000;
  const double lo = -12.0, dz = (zh - lo) / steps;
  for (int i = 0; i <= steps; ++i) {
    double z = lo + i * dz;
    double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    integral += w * z * normal_pdf(z) * dz;
  }
  CHECK((y[0] + y[1]) / 2 == doctest::Approx(integral / h).epsilon(1e-6));
}

TEST_CASE("positive increment inverse is stable for large values") {
  CHECK(inverse_positive_increment(1000.0) == doctest::Approx(1000.0 - kPwlSlopeFloor));
  CHECK(positive_increment(inverse_positive_increment(0.01)) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK_THROWS_AS(inverse_positive_increment(0.0), Error);
}
