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
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qhmm/io.hpp"
#include "qhmm/learning.hpp"

namespace qhmm {

struct LandscapeSample {
  double op_distance = 0.0;         // spectral norm of U* - U_t
  std::vector<double> divergences;  // Delta_n for n = 1..n_max
  double total = 0.0;               // Delta_{<=n_max}
};

/// Cumulative random walk from the optimum: each step perturbs one uniformly
/// chosen parameter by N(0, sigma), sigma = std_fraction * |value|, or
/// std_fraction * 2 pi for a zero value.
std::vector<LandscapeSample> landscape_walk(const Hypothesis& optimum, std::size_t alphabet_size,
                                            std::size_t n_max, std::size_t steps,
                                            double std_fraction, Rng& rng);

/// Sample Pearson correlation; nullopt when either variance vanishes or
/// fewer than two points are given.
std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);
/// Pearson r between total divergence and operator distance over samples with
/// op_distance <= max_distance. Needs 30 samples; nullopt if fewer than 30
/// fall inside the window or a variance vanishes.
std::optional<double> landscape_correlation(const std::vector<LandscapeSample>& samples,
                                            double max_distance = 2.0);
/// Distance window used for the reported landscape correlation.
inline constexpr double kLandscapeWindow = 1.0;
/// Delta_{<=n} / (2 n) <= op_distance + slack.
bool smoothness_bound_holds(const LandscapeSample& s, double slack = 1e-9);

struct LandscapeBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  std::vector<double> mean_divergences;
  double mean_total = 0.0;
};

/// Bins of the given width over op_distance in [0, 2]; empty bins are dropped.
std::vector<LandscapeBin> bin_landscape(const std::vector<LandscapeSample>& samples,
                                        double width = 0.05);
std::string landscape_csv(const std::vector<LandscapeSample>& samples);
std::string landscape_bins_csv(const std::vector<LandscapeBin>& bins);

/// 7 x 7 reference Hankel block of the amplitude-damping process over
/// prefixes and suffixes e, 0, 1, 00, 01, 10, 11.
RealMatrix amplitude_damping_hankel_reference();

/// Two-qubit RealAmplitudes (reps 1, linear) on one state and one emission qubit.
AnsatzSpec market_ansatz_spec();
inline constexpr std::size_t kMarketAnsatzLengths = 3;
/// Three-qubit EfficientSU2 (RZ, RX; full; reps 3) on one state and two emission qubits.
AnsatzSpec monras_ansatz_spec();
inline constexpr std::size_t kMonrasAnsatzLengths = 2;

/// One state qubit, one emission qubit, gates X, Y, RX, RY, rho0 = I/2.
Problem market_problem(std::size_t n = 5);
/// One state qubit, two emission qubits, gates X, Y, RX, RY, P.
Problem gaussian_problem(std::size_t n = 3);
/// Hidden 1- or 2-gate model in the market hypothesis space; the problem's
/// target is its exact distribution up to length n.
std::pair<Problem, Hypothesis> planted_problem(std::uint64_t seed, std::size_t gates,
                                               std::size_t n = 4);

/// Learned market model used as the landscape optimum (best ansatz restart).
Hypothesis learned_market_model(std::uint64_t seed = 1, int threads = 0);

struct ExperimentOptions {
  std::uint64_t seed = 1;
  int threads = 0;
  std::size_t restarts = 10;
  std::size_t ansatz_budget = 20000;
  std::size_t evo_seeds = 3;
  std::size_t mu = 100;
  std::size_t g_max = 400;
};

struct ExperimentReport {
  std::string name;
  bool passed = false;
  Json summary;
  /// (file name, contents) pairs for CSV outputs.
  std::vector<std::pair<std::string, std::string>> files;
  double seconds = 0.0;
};

/// table2, monras_ansatz, market_ansatz, market_evo, gaussian_evo.
const std::vector<std::string>& experiment_names();
ExperimentReport reproduce(const std::string& name, const ExperimentOptions& opts = {});

}  // namespace qhmm
