// Copyright 2026 The qhmm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "qhmm/linalg.hpp"
#include "qhmm/optimize.hpp"

namespace qhmm {
namespace {

constexpr double kTwoPi = 6.283185307179586;

ObjectiveSpec spec(std::size_t arity, Objective f, std::size_t budget = 5000) {
  ObjectiveSpec s;
  s.arity = arity;
  s.evaluate = std::move(f);
  s.budget = budget;
  return s;
}

double rosenbrock(const std::vector<double>& x) {
  return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
}

double bowl(const std::vector<double>& x) {
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) v += (i + 1.0) * std::pow(x[i] - 0.5 * i, 2);
  return v;
}

struct Case {
  std::string name;
  std::size_t arity;
  Objective f;
  std::vector<double> x0;
  double optimum;
};

std::vector<Case> smooth_suite() {
  return {
      {"sphere", 3, [](const auto& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; }, {1, -2, 0.5}, 0},
      {"bowl", 4, bowl, {0, 0, 0, 0}, 0},
      {"shifted", 2, [](const auto& x) { return std::pow(x[0] - 3, 2) + std::pow(x[1] + 1, 2) + 2; }, {0, 0}, 2},
      {"booth", 2, [](const auto& x) { return std::pow(x[0] + 2 * x[1] - 7, 2) + std::pow(2 * x[0] + x[1] - 5, 2); }, {0, 0}, 0},
      {"matyas", 2, [](const auto& x) { return 0.26 * (x[0] * x[0] + x[1] * x[1]) - 0.48 * x[0] * x[1]; }, {1, 0.5}, 0},
      {"rastrigin_basin", 2, [](const auto& x) {
         return 20 + x[0] * x[0] - 10 * std::cos(kTwoPi * x[0]) + x[1] * x[1] - 10 * std::cos(kTwoPi * x[1]);
       }, {0.2, -0.15}, 0},
      {"cosine_well", 1, [](const auto& x) { return 1 - std::cos(x[0]); }, {1.0}, 0},
      {"beale", 2, [](const auto& x) {
         return std::pow(1.5 - x[0] + x[0] * x[1], 2) + std::pow(2.25 - x[0] + x[0] * x[1] * x[1], 2) +
                std::pow(2.625 - x[0] + x[0] * std::pow(x[1], 3), 2);
       }, {2.5, 0.3}, 0},
      {"quartic", 2, [](const auto& x) { return std::pow(x[0] - 1, 4) + std::pow(x[1], 2); }, {0, 1}, 0},
      {"elliptic", 3, [](const auto& x) { return x[0] * x[0] + 10 * x[1] * x[1] + 100 * x[2] * x[2]; }, {1, 1, 1}, 0},
  };
}

TEST(NelderMead, ConvexOneD) {
  const OptResult r = nelder_mead(spec(1, [](const auto& x) { return std::pow(x[0] - 2, 2); }), {0.0});
  EXPECT_NEAR(r.best_params[0], 2.0, 1e-4);
  EXPECT_TRUE(r.converged);
}

TEST(NelderMead, SymmetricSimplexIsNotConverged) {
  // Start so the first simplex straddles the minimum with equal values.
  const OptResult r = nelder_mead(spec(1, [](const auto& x) { return std::pow(x[0] - 2, 2); }), {1.875});
  EXPECT_NEAR(r.best_params[0], 2.0, 1e-4);
}

TEST(NelderMead, Rosenbrock) {
  const OptResult r = nelder_mead(spec(2, rosenbrock, 5000), {-1.0, 1.0});
  EXPECT_LT(r.best_value, 1e-6);
}

TEST(NelderMead, ConstantConvergesAtStart) {
  const OptResult r = nelder_mead(spec(2, [](const auto&) { return 3.0; }), {0.4, -0.2});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.best_params, (std::vector<double>{0.4, -0.2}));
  EXPECT_LT(r.evaluations, 200u);
}

TEST(FdGradient, MatchesAnalyticGradient) {
  const std::vector<double> x{0.3, -1.2, 2.0, 0.7};
  const auto g = fd_gradient(bowl, x, 1e-5);
  for (std::size_t i = 0; i < x.size(); ++i)
    EXPECT_NEAR(g[i], 2.0 * (i + 1.0) * (x[i] - 0.5 * i), 1e-6);
}

TEST(FdGradientDescent, QuadraticBowlAndZeroArity) {
  const OptResult r = fd_gradient_descent(spec(4, bowl), {0, 0, 0, 0});
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r.best_params[i], 0.5 * i, 1e-6);

  const OptResult z = fd_gradient_descent(spec(0, [](const auto&) { return 1.5; }), {});
  EXPECT_TRUE(z.best_params.empty());
  EXPECT_DOUBLE_EQ(z.best_value, 1.5);
}

TEST(FdGradientDescent, AcceptedValuesNonIncreasing) {
  const OptResult r = fd_gradient_descent(spec(2, rosenbrock, 3000), {-1.0, 1.0});
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i], r.trace[i - 1]);
}

TEST(CoordinateSearch, SeparableAndBudgetOne) {
  const OptResult r = coordinate_search(
      spec(3, [](const auto& x) { return std::pow(x[0] - 1, 2) + std::pow(x[1] + 2, 2) + x[2] * x[2]; }),
      {0, 0, 0});
  EXPECT_NEAR(r.best_params[0], 1.0, 1e-5);
  EXPECT_NEAR(r.best_params[1], -2.0, 1e-5);
  EXPECT_NEAR(r.best_params[2], 0.0, 1e-5);

  std::size_t calls = 0;
  const OptResult one = coordinate_search(
      spec(2, [&](const auto& x) { ++calls; return bowl(x); }, 1), {1.0, 1.0});
  EXPECT_EQ(one.evaluations, 1u);
  EXPECT_EQ(calls, 1u);
  EXPECT_FALSE(one.converged);
}

TEST(Optimizers, SmoothSuiteAndNeverWorseThanStart) {
  for (const std::string& label : {std::string("nm"), std::string("cbla"), std::string("bfsg")}) {
    const Optimizer opt = lookup_optimizer(label);
    for (const Case& c : smooth_suite()) {
      const OptResult r = opt(spec(c.arity, c.f, 20000), c.x0, {});
      EXPECT_LT(r.best_value - c.optimum, 1e-4) << label << " on " << c.name;
      EXPECT_LE(r.best_value, c.f(c.x0) + 1e-12);
      EXPECT_EQ(r.trace.size(), r.evaluations);
    }
  }
}

TEST(Optimizers, Deterministic) {
  for (const std::string& label : optimizer_labels()) {
    const Optimizer opt = lookup_optimizer(label);
    const OptResult a = opt(spec(2, rosenbrock, 400), {-1.0, 1.0}, {});
    const OptResult b = opt(spec(2, rosenbrock, 400), {-1.0, 1.0}, {});
    EXPECT_EQ(a.trace, b.trace) << label;
    EXPECT_LE(a.evaluations, 400u);
  }
}

TEST(Optimizers, StopsAtTarget) {
  ObjectiveSpec s = spec(2, bowl, 10000);
  s.target = 1e-3;
  const OptResult r = nelder_mead(s, {3.0, 3.0});
  EXPECT_LE(r.best_value, 1e-3);
  EXPECT_GT(r.best_value, 1e-8);
}

TEST(Registry, Labels) {
  EXPECT_EQ(optimizer_labels().size(), 6u);
  for (const std::string& l : {"tnc", "cbla", "bfsg", "gc", "slsqp", "nm"}) EXPECT_NO_THROW(lookup_optimizer(l));
  EXPECT_THROW(lookup_optimizer("powell"), Error);
  // cbla and tnc share the coordinate search.
  const auto a = lookup_optimizer("cbla")(spec(2, bowl, 300), {1.0, 1.0}, {});
  const auto b = coordinate_search(spec(2, bowl, 300), {1.0, 1.0});
  EXPECT_EQ(a.trace, b.trace);
}

}  // namespace
}  // namespace qhmm
