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

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qhmm {

using Objective = std::function<double(const std::vector<double>&)>;

/// A function to minimize, with an evaluation budget and an optional value
/// at which to stop early.
struct ObjectiveSpec {
  std::size_t arity = 0;
  Objective evaluate;
  std::size_t budget = 1000;
  std::optional<double> target;
};

struct OptResult {
  std::vector<double> best_params;
  double best_value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
  std::vector<double> trace;  // best value after every evaluation
};

struct OptimizerOptions {
  double initial_step = 0.25;  // simplex edge / first coordinate probe
  double f_tol = 1e-10;        // simplex value spread
  double x_tol = 1e-8;         // simplex diameter / coordinate step floor
  double fd_epsilon = 1e-5;
  double grad_tol = 1e-7;
  double line_step = 1.0;  // first trial step of the line search
};

OptResult nelder_mead(const ObjectiveSpec& obj, const std::vector<double>& x0,
                      const OptimizerOptions& opts = {});
/// Steepest descent on central finite differences with Armijo backtracking.
OptResult fd_gradient_descent(const ObjectiveSpec& obj, const std::vector<double>& x0,
                              const OptimizerOptions& opts = {});
/// Cyclic coordinate descent; each axis is bracketed and refined by golden section.
OptResult coordinate_search(const ObjectiveSpec& obj, const std::vector<double>& x0,
                            const OptimizerOptions& opts = {});

/// Central-difference gradient; exposed for tests.
std::vector<double> fd_gradient(const Objective& f, const std::vector<double>& x, double eps);

using Optimizer = std::function<OptResult(const ObjectiveSpec&, const std::vector<double>&,
                                          const OptimizerOptions&)>;

/// Labels accepted by lookup_optimizer: tnc, cbla, bfsg, gc, slsqp, nm.
const std::vector<std::string>& optimizer_labels();
/// tnc, cbla -> coordinate_search; bfsg, gc, slsqp -> fd_gradient_descent;
/// nm -> nelder_mead. Throws Error for unknown labels.
Optimizer lookup_optimizer(const std::string& label);

}  // namespace qhmm
