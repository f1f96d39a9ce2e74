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
#include <vector>

#include "qhmm/circuit.hpp"
#include "qhmm/language.hpp"
#include "qhmm/model.hpp"
#include "qhmm/optimize.hpp"
#include "qhmm/rng.hpp"

namespace qhmm {

enum class Rho0Kind { Ground, MaximallyMixed, MaximallyEntangled };

std::string rho0_kind_name(Rho0Kind k);
Rho0Kind parse_rho0_kind(const std::string& name);
/// Initial system state for a kind. A maximally entangled state of the
/// system with a reference copy reduces to I/N on the system.
DensityOperator initial_state(Rho0Kind kind, std::size_t dim);

/// A candidate model: a circuit on state qubits (most significant) followed
/// by emission qubits, read out through the emission register with reset.
struct Hypothesis {
  Circuit circuit{2};
  std::size_t state_qubits = 1;
  std::size_t emission_qubits = 1;
  std::vector<int> symbol_map;  // per emission outcome; empty means e mod m
  Rho0Kind rho0_kind = Rho0Kind::MaximallyMixed;
  std::optional<double> fitness;
  std::optional<double> divergence;  // Delta_{<=n} at the stored parameters
  std::optional<std::vector<double>> optimal_params;

  std::size_t dim_s() const { return std::size_t{1} << state_qubits; }
  std::size_t dim_e() const { return std::size_t{1} << emission_qubits; }
};

QhmmUnitary to_model(const Hypothesis& h, std::size_t alphabet_size);
std::vector<DistributionTable> hypothesis_distributions(const Hypothesis& h,
                                                        std::size_t alphabet_size,
                                                        std::size_t n);

struct FitnessWeights {
  double c_q = 0.01;
  double c_e = 0.01;
};

/// c_q * (two-qubit gates) / C(qubits, 2) + c_e * M / N^2. The gate term is
/// zero for single-qubit circuits.
double complexity(const Hypothesis& h, const FitnessWeights& w);

struct Evaluation {
  double fitness = 0.0;
  double divergence = 0.0;
};

/// Target tables cover lengths 1..n over one alphabet.
Evaluation evaluate(const Hypothesis& h, const std::vector<DistributionTable>& target,
                    const FitnessWeights& w);
/// -(Delta_{<=n} + complexity); never positive.
double fitness(const Hypothesis& h, const std::vector<DistributionTable>& target,
               const FitnessWeights& w);

/// Everything a search needs to score candidates.
struct Problem {
  std::vector<DistributionTable> target;
  std::size_t state_qubits = 1;
  std::size_t emission_qubits = 1;
  std::vector<int> symbol_map;
  Rho0Kind rho0_kind = Rho0Kind::MaximallyMixed;
  std::vector<GateType> gate_set{GateType::X, GateType::Y, GateType::RX, GateType::RY};
  std::size_t min_gates = 3;
  std::size_t max_gates = 20;
  FitnessWeights weights;
  std::size_t optimizer_budget = 200;  // objective evaluations per parameter fit

  std::size_t alphabet_size() const;
  std::size_t n_qubits() const { return state_qubits + emission_qubits; }
};

/// Fits the circuit parameters to maximize fitness and writes them back.
Hypothesis optimize_parameters(const Hypothesis& h, const Problem& p,
                               const std::string& optimizer_label, std::size_t budget);

/// Bandit-adapted distribution over a finite domain of labelled values.
class AdaptiveDistribution {
 public:
  AdaptiveDistribution() = default;
  explicit AdaptiveDistribution(std::vector<std::string> domain);

  const std::vector<std::string>& domain() const { return domain_; }
  const std::vector<double>& probs() const { return probs_; }
  const std::vector<double>& rewards() const { return rewards_; }
  std::size_t size() const { return domain_.size(); }

  std::size_t sample(Rng& rng) const { return sample_index(probs_, rng); }
  void reward(std::size_t index, double amount = 1.0) { rewards_.at(index) += amount; }
  void add_rewards(const AdaptiveDistribution& other);
  void clear_rewards();
  void set_probs(std::vector<double> probs);

 private:
  std::vector<std::string> domain_;
  std::vector<double> probs_;
  std::vector<double> rewards_;
};

/// p_i = gamma / k + (1 - gamma) r_i / sum r; uniform when no rewards.
/// Rewards are cleared.
AdaptiveDistribution bandit_update(const AdaptiveDistribution& d, double gamma);

enum class SelectionMethod { Fitness, Rank, Tournament };

/// All adaptive distributions used by the evolutionary search.
struct SearchDistributions {
  AdaptiveDistribution selection_type;
  AdaptiveDistribution selection_strength;
  AdaptiveDistribution survival_type;
  AdaptiveDistribution survival_strength;
  AdaptiveDistribution gates;
  AdaptiveDistribution qubits;  // single qubits, then ordered pairs
  AdaptiveDistribution search_len;
  AdaptiveDistribution search_type;
  AdaptiveDistribution mutation_rate;
  AdaptiveDistribution mutation_type;
  AdaptiveDistribution optimizer;

  SearchDistributions() = default;
  SearchDistributions(const std::vector<GateType>& gate_set, std::size_t n_qubits,
                      const std::vector<std::string>& optimizers, std::size_t max_search_len = 10);

  GateSampler sampler(const std::vector<GateType>& gate_set) const;
  std::vector<AdaptiveDistribution*> all();
  std::vector<const AdaptiveDistribution*> all() const;
  std::vector<std::string> names() const;
  void add_rewards(const SearchDistributions& other);
  void clear_rewards();
  void adapt(double gamma);
};

/// tau = (t^{3/2} + 1)^{-1/4}.
double temperature(std::size_t t);
/// Probability of keeping a child with fitness f_new in place of f_old.
double acceptance_probability(double f_old, double f_new, double tau);

/// Population ranked fittest first. Returns indices into `ranked`.
std::vector<std::size_t> select_parents(const std::vector<Hypothesis>& ranked, std::size_t count,
                                        SelectionMethod method, double strength, Rng& rng);
/// Selection weights for `select_parents` (tournament has no closed form here).
std::vector<double> selection_weights(const std::vector<Hypothesis>& ranked,
                                      SelectionMethod method, double strength);

/// Survival weights (d_r + 1)^{-1}, d_r = exp(s (r - pool)), r = 1 fittest.
std::vector<double> survival_weights(std::size_t pool, double strength);
/// Pool ranked fittest first; keeps index 0 and samples mu - 1 more
/// without replacement. Returns the kept indices, fittest first.
std::vector<std::size_t> select_survivors(const std::vector<Hypothesis>& ranked, std::size_t mu,
                                          SelectionMethod method, double strength, Rng& rng);

/// Per-call counters from modify_hypothesis.
struct ModifyStats {
  std::size_t steps = 0;
  std::size_t improved_steps = 0;
  std::size_t accepted_inferior = 0;
};

/// Stochastic local search around `h`; rewards are added to `dist`.
/// `forced_rate` overrides the sampled mutation rate when set.
Hypothesis modify_hypothesis(const Hypothesis& h, double tau, const Problem& p,
                             SearchDistributions& dist, Rng& rng, ModifyStats* stats = nullptr,
                             std::optional<double> forced_rate = std::nullopt);

Hypothesis random_hypothesis(const Problem& p, SearchDistributions& dist, Rng& rng);

struct HyperParams {
  std::size_t mu = 20;
  std::size_t lambda = 20;
  double gamma_bandit = 0.2;
  std::size_t prog_window = 10;
  std::size_t g_max = 100;
  std::size_t n_max = 7;  // longest target length used by the fitness
  double target_fitness = -1e-3;
  /// Also stop once the best divergence is at or below this value.
  std::optional<double> target_divergence;
  std::size_t max_search_len = 10;
  std::vector<std::string> optimizers{"tnc", "cbla", "bfsg", "gc", "slsqp"};
  std::uint64_t seed = 1;
  int threads = 0;  // <= 0: OpenMP default; 1: serial
};

struct GenerationStats {
  std::size_t generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  double best_divergence = 0.0;
  double temperature = 1.0;
  std::size_t accepted_inferior = 0;
  std::size_t improved_children = 0;
};

struct LearningReport {
  std::vector<GenerationStats> generations;
  /// bandit_traces[d][g] = probabilities of distribution d after generation g.
  std::vector<std::string> bandit_names;
  std::vector<std::vector<std::string>> bandit_domains;
  std::vector<std::vector<std::vector<double>>> bandit_traces;
  double wall_seconds = 0.0;
  bool reached_target = false;
  Hypothesis best;
};

LearningReport evolve(const Problem& p, const HyperParams& hp);

// Ansatz training.

enum class AnsatzTemplate { RealAmplitudes, EfficientSU2 };

struct AnsatzSpec {
  AnsatzTemplate kind = AnsatzTemplate::RealAmplitudes;
  std::size_t state_qubits = 1;
  std::size_t emission_qubits = 1;
  std::size_t reps = 1;
  Entanglement entanglement = Entanglement::Linear;
  RotationPair rotations = RotationPair::RZ_RX;
  std::vector<int> symbol_map;
  Rho0Kind rho0_kind = Rho0Kind::MaximallyMixed;
};

std::string ansatz_template_name(AnsatzTemplate t);
AnsatzTemplate parse_ansatz_template(const std::string& name);
Circuit build_ansatz(const AnsatzSpec& spec);

/// sum over every sequence of length l of l * (p_target - p_current)^2.
double ansatz_cost(const std::vector<DistributionTable>& target,
                   const std::vector<DistributionTable>& current);

struct AnsatzResult {
  std::vector<double> params;
  double cost = 0.0;
  std::size_t evaluations = 0;
  std::vector<double> trace;  // best cost after each evaluation
  std::size_t restart = 0;
};

AnsatzResult train_ansatz(const AnsatzSpec& spec, const std::vector<DistributionTable>& target,
                          const std::string& optimizer_label, const std::vector<double>& x0,
                          std::size_t budget);
/// Independent restarts from x0 ~ U[0, 2 pi); returns every run, best first.
std::vector<AnsatzResult> train_ansatz_restarts(const AnsatzSpec& spec,
                                                const std::vector<DistributionTable>& target,
                                                const std::string& optimizer_label,
                                                std::size_t restarts, std::size_t budget,
                                                std::uint64_t seed, int threads = 0);

}  // namespace qhmm
