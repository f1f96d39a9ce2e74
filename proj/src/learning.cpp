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

#include "qhmm/learning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>

#if QHMM_HAVE_OPENMP
#include <omp.h>
#endif

namespace qhmm {

namespace {

constexpr double kTwoPi = 6.283185307179586;

std::vector<int> effective_map(const std::vector<int>& map, std::size_t dim_e, std::size_t m) {
  if (map.empty()) return QhmmUnitary::modular_symbol_map(dim_e, m);
  if (map.size() != dim_e) throw DimensionError("symbol map must cover every emission outcome");
  return map;
}

/// Kraus groups of the reset-emission reading, built straight from the
/// compiled unitary: K_e[s', s] = U[s' M + e, s M].
struct FastModel {
  std::size_t dim = 0;
  std::vector<std::vector<ComplexMatrix>> groups;
  ComplexMatrix rho0;
};

FastModel fast_model(const Hypothesis& h, std::size_t m) {
  const std::size_t n = h.dim_s(), me = h.dim_e();
  if (h.circuit.n_qubits() != h.state_qubits + h.emission_qubits)
    throw DimensionError("hypothesis circuit width must equal state plus emission qubits");
  if (me < m) throw DimensionError("emission register is smaller than the alphabet");
  const std::vector<int> map = effective_map(h.symbol_map, me, m);
  const ComplexMatrix u = compile(h.circuit).matrix();
  FastModel f;
  f.dim = n;
  f.groups.resize(m);
  for (std::size_t e = 0; e < me; ++e) {
    const int a = map[e];
    if (a < 0 || static_cast<std::size_t>(a) >= m) throw DimensionError("symbol map entry out of range");
    ComplexMatrix k(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t sp = 0; sp < n; ++sp)
      for (std::size_t s = 0; s < n; ++s)
        k(static_cast<Eigen::Index>(sp), static_cast<Eigen::Index>(s)) =
            u(static_cast<Eigen::Index>(sp * me + e), static_cast<Eigen::Index>(s * me));
    f.groups[static_cast<std::size_t>(a)].push_back(std::move(k));
  }
  f.rho0 = initial_state(h.rho0_kind, n).matrix();
  return f;
}

struct Descent {
  const FastModel& f;
  std::size_t m;
  std::vector<DistributionTable>& out;
  std::vector<ComplexMatrix> work;  // one state per depth
  ComplexMatrix tmp;

  void run(std::size_t depth, std::size_t index) {
    const ComplexMatrix& rho = work[depth];
    ComplexMatrix& sigma = work[depth + 1];
    for (std::size_t a = 0; a < m; ++a) {
      sigma.setZero();
      for (const ComplexMatrix& k : f.groups[a]) {
        tmp.noalias() = k * rho;
        sigma.noalias() += tmp * k.adjoint();
      }
      const double p = std::max(sigma.trace().real(), 0.0);
      const std::size_t idx = index * m + a;
      out[depth][idx] = p;
      if (depth + 1 < out.size() && p > 1e-15) run(depth + 1, idx);
    }
  }
};

std::vector<DistributionTable> fast_distributions(const FastModel& f, std::size_t m, std::size_t n) {
  std::vector<DistributionTable> out;
  for (std::size_t t = 1; t <= n; ++t) out.emplace_back(m, t);
  if (n == 0) return out;
  const auto d = static_cast<Eigen::Index>(f.dim);
  Descent run{f, m, out, std::vector<ComplexMatrix>(n + 1, ComplexMatrix::Zero(d, d)),
              ComplexMatrix::Zero(d, d)};
  run.work[0] = f.rho0;
  run.run(0, 0);
  return out;
}

double divergence_of(const Hypothesis& h, const std::vector<DistributionTable>& target) {
  if (target.empty()) return 0.0;
  const std::size_t m = target.front().alphabet_size();
  return divergence_avg(target, fast_distributions(fast_model(h, m), m, target.size()));
}

double binomial2(std::size_t n) { return n < 2 ? 0.0 : 0.5 * static_cast<double>(n * (n - 1)); }

std::size_t qubit_slot(const GateSpec& g, std::size_t n) {
  if (g.control < 0) return static_cast<std::size_t>(g.target);
  return n + pair_index(g.control, g.target, n);
}

template <typename Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
#if QHMM_HAVE_OPENMP
  if (threads != 1) {
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i)
      body(static_cast<std::size_t>(i));
    return;
  }
#else
  (void)threads;
#endif
  for (std::size_t i = 0; i < count; ++i) body(i);
}

double fitness_value(const Hypothesis& h) {
  return h.fitness ? *h.fitness : -std::numeric_limits<double>::infinity();
}

void rank_population(std::vector<Hypothesis>& pop) {
  std::stable_sort(pop.begin(), pop.end(), [](const Hypothesis& a, const Hypothesis& b) {
    return fitness_value(a) > fitness_value(b);
  });
}

SelectionMethod method_from(const std::string& label) {
  if (label == "fitness") return SelectionMethod::Fitness;
  if (label == "rank") return SelectionMethod::Rank;
  if (label == "tournament") return SelectionMethod::Tournament;
  throw Error("unknown selection method '" + label + "'");
}

std::vector<std::string> numbered(std::size_t from, std::size_t to) {
  std::vector<std::string> out;
  for (std::size_t i = from; i <= to; ++i) out.push_back(std::to_string(i));
  return out;
}

}  // namespace

std::string rho0_kind_name(Rho0Kind k) {
  switch (k) {
    case Rho0Kind::Ground: return "ground";
    case Rho0Kind::MaximallyMixed: return "maximally_mixed";
    case Rho0Kind::MaximallyEntangled: return "maximally_entangled";
  }
  return "?";
}

Rho0Kind parse_rho0_kind(const std::string& name) {
  for (Rho0Kind k : {Rho0Kind::Ground, Rho0Kind::MaximallyMixed, Rho0Kind::MaximallyEntangled})
    if (rho0_kind_name(k) == name) return k;
  throw Error("unknown initial state kind '" + name + "'");
}

DensityOperator initial_state(Rho0Kind kind, std::size_t dim) {
  if (kind == Rho0Kind::Ground) return DensityOperator::ground(dim);
  return DensityOperator::maximally_mixed(dim);
}

QhmmUnitary to_model(const Hypothesis& h, std::size_t alphabet_size) {
  std::vector<std::string> alphabet;
  for (std::size_t a = 0; a < alphabet_size; ++a) alphabet.push_back(std::to_string(a));
  return QhmmUnitary(std::move(alphabet), h.dim_s(), h.dim_e(), compile(h.circuit),
                     effective_map(h.symbol_map, h.dim_e(), alphabet_size),
                     initial_state(h.rho0_kind, h.dim_s()));
}

std::vector<DistributionTable> hypothesis_distributions(const Hypothesis& h,
                                                        std::size_t alphabet_size,
                                                        std::size_t n) {
  return fast_distributions(fast_model(h, alphabet_size), alphabet_size, n);
}

double complexity(const Hypothesis& h, const FitnessWeights& w) {
  const std::size_t nq = h.state_qubits + h.emission_qubits;
  const double pairs = binomial2(nq);
  const double gate_term =
      pairs > 0.0 ? static_cast<double>(h.circuit.two_qubit_count()) / pairs : 0.0;
  const double n = static_cast<double>(h.dim_s());
  return w.c_q * gate_term + w.c_e * static_cast<double>(h.dim_e()) / (n * n);
}

Evaluation evaluate(const Hypothesis& h, const std::vector<DistributionTable>& target,
                    const FitnessWeights& w) {
  Evaluation e;
  e.divergence = divergence_of(h, target);
  e.fitness = -(e.divergence + complexity(h, w));
  return e;
}

double fitness(const Hypothesis& h, const std::vector<DistributionTable>& target,
               const FitnessWeights& w) {
  return evaluate(h, target, w).fitness;
}

std::size_t Problem::alphabet_size() const {
  if (target.empty()) throw Error("learning problem has no target tables");
  return target.front().alphabet_size();
}

Hypothesis optimize_parameters(const Hypothesis& h, const Problem& p,
                               const std::string& optimizer_label, std::size_t budget) {
  Hypothesis out = h;
  const std::vector<double> x0 = h.circuit.params();
  if (x0.empty() || budget <= 1) {
    const Evaluation e = evaluate(h, p.target, p.weights);
    out.fitness = e.fitness;
    out.divergence = e.divergence;
    out.optimal_params = x0;
    return out;
  }
  const double comp = complexity(h, p.weights);
  ObjectiveSpec obj;
  obj.arity = x0.size();
  obj.budget = budget;
  obj.target = 0.0;
  obj.evaluate = [&](const std::vector<double>& x) {
    Hypothesis trial = h;
    trial.circuit = h.circuit.with_params(x);
    return divergence_of(trial, p.target);
  };
  const OptResult r = lookup_optimizer(optimizer_label)(obj, x0, OptimizerOptions{});
  out.circuit = h.circuit.with_params(r.best_params);
  out.divergence = r.best_value;
  out.fitness = -(r.best_value + comp);
  out.optimal_params = r.best_params;
  return out;
}

AdaptiveDistribution::AdaptiveDistribution(std::vector<std::string> domain)
    : domain_(std::move(domain)) {
  if (domain_.empty()) throw Error("adaptive distribution needs a nonempty domain");
  probs_.assign(domain_.size(), 1.0 / static_cast<double>(domain_.size()));
  rewards_.assign(domain_.size(), 0.0);
}

void AdaptiveDistribution::add_rewards(const AdaptiveDistribution& other) {
  if (other.rewards_.size() != rewards_.size()) throw DimensionError("reward vector mismatch");
  for (std::size_t i = 0; i < rewards_.size(); ++i) rewards_[i] += other.rewards_[i];
}

void AdaptiveDistribution::clear_rewards() { std::fill(rewards_.begin(), rewards_.end(), 0.0); }

void AdaptiveDistribution::set_probs(std::vector<double> probs) {
  if (probs.size() != domain_.size()) throw DimensionError("probability vector mismatch");
  double sum = 0.0;
  for (double v : probs) {
    if (!(v >= 0.0)) throw InvariantError("probabilities must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvariantError("probabilities must sum to 1");
  probs_ = std::move(probs);
}

AdaptiveDistribution bandit_update(const AdaptiveDistribution& d, double gamma) {
  if (gamma < 0.0 || gamma > 1.0) throw Error("bandit gamma must lie in [0, 1]");
  AdaptiveDistribution out = d;
  const std::size_t k = d.size();
  double total = 0.0;
  for (double r : d.rewards()) {
    if (r < 0.0) throw InvariantError("rewards must be nonnegative");
    total += r;
  }
  std::vector<double> p(k, 1.0 / static_cast<double>(k));
  if (total > 0.0)
    for (std::size_t i = 0; i < k; ++i)
      p[i] = gamma / static_cast<double>(k) + (1.0 - gamma) * d.rewards()[i] / total;
  out.set_probs(std::move(p));
  out.clear_rewards();
  return out;
}

SearchDistributions::SearchDistributions(const std::vector<GateType>& gate_set,
                                         std::size_t n_qubits,
                                         const std::vector<std::string>& optimizers,
                                         std::size_t max_search_len)
    : selection_type({"fitness", "rank", "tournament"}),
      selection_strength({"0.1", "0.2", "0.5", "0.7", "1"}),
      survival_type({"fitness", "rank"}),
      survival_strength({"0.1", "0.2", "0.5", "0.7", "1"}),
      search_len(numbered(1, std::max<std::size_t>(max_search_len, 1))),
      search_type({"depth", "breadth"}),
      mutation_rate({"0.1", "0.2", "0.3", "0.4", "0.5"}),
      mutation_type({"gte", "qbt", "rpl", "dlt", "ins"}),
      optimizer(optimizers) {
  std::vector<std::string> g;
  for (GateType t : gate_set) g.push_back(gate_name(t));
  gates = AdaptiveDistribution(g);
  std::vector<std::string> q;
  for (std::size_t i = 0; i < n_qubits; ++i) q.push_back("q" + std::to_string(i));
  for (std::size_t i = 0; i < n_qubits * (n_qubits - 1); ++i) {
    const auto [c, t] = pair_at(i, n_qubits);
    q.push_back("q" + std::to_string(c) + ">q" + std::to_string(t));
  }
  qubits = AdaptiveDistribution(q);
  for (const std::string& label : optimizers) lookup_optimizer(label);
}

GateSampler SearchDistributions::sampler(const std::vector<GateType>& gate_set) const {
  GateSampler s;
  s.gate_set = gate_set;
  s.gate_weights = gates.probs();
  s.qubit_weights = qubits.probs();
  return s;
}

std::vector<AdaptiveDistribution*> SearchDistributions::all() {
  return {&selection_type, &selection_strength, &survival_type, &survival_strength,
          &gates,          &qubits,             &search_len,    &search_type,
          &mutation_rate,  &mutation_type,      &optimizer};
}

std::vector<const AdaptiveDistribution*> SearchDistributions::all() const {
  return {&selection_type, &selection_strength, &survival_type, &survival_strength,
          &gates,          &qubits,             &search_len,    &search_type,
          &mutation_rate,  &mutation_type,      &optimizer};
}

std::vector<std::string> SearchDistributions::names() const {
  return {"selection_type", "selection_strength", "survival_type", "survival_strength",
          "gates",          "qubits",             "search_len",    "search_type",
          "mutation_rate",  "mutation_type",      "optimizer"};
}

void SearchDistributions::add_rewards(const SearchDistributions& other) {
  auto mine = all();
  auto theirs = other.all();
  for (std::size_t i = 0; i < mine.size(); ++i) mine[i]->add_rewards(*theirs[i]);
}

void SearchDistributions::clear_rewards() {
  for (AdaptiveDistribution* d : all()) d->clear_rewards();
}

void SearchDistributions::adapt(double gamma) {
  for (AdaptiveDistribution* d : all()) *d = bandit_update(*d, gamma);
}

double temperature(std::size_t t) {
  return std::pow(std::pow(static_cast<double>(t), 1.5) + 1.0, -0.25);
}

double acceptance_probability(double f_old, double f_new, double tau) {
  if (f_new >= f_old) return 1.0;
  if (std::abs(f_old) < 1e-12 || !(tau > 0.0)) return 0.0;
  const double p = std::exp((0.6 / tau) * (f_old - f_new) / f_old);
  return std::clamp(p, 0.0, 1.0);
}

std::vector<double> selection_weights(const std::vector<Hypothesis>& ranked,
                                      SelectionMethod method, double strength) {
  const std::size_t mu = ranked.size();
  std::vector<double> w(mu, 1.0);
  if (method == SelectionMethod::Rank) {
    for (std::size_t i = 0; i < mu; ++i) {
      const double base = static_cast<double>(mu - (i + 1));
      w[i] = base == 0.0 ? 0.0 : std::pow(base, strength);
    }
  } else if (method == SelectionMethod::Fitness) {
    double lo = std::numeric_limits<double>::infinity();
    for (const Hypothesis& h : ranked) lo = std::min(lo, fitness_value(h));
    for (std::size_t i = 0; i < mu; ++i)
      w[i] = std::pow(fitness_value(ranked[i]) - lo + 1e-12, strength);
  }
  return w;
}

std::vector<std::size_t> select_parents(const std::vector<Hypothesis>& ranked, std::size_t count,
                                        SelectionMethod method, double strength, Rng& rng) {
  if (ranked.empty()) throw Error("cannot select parents from an empty population");
  std::vector<std::size_t> out;
  out.reserve(count);
  if (method == SelectionMethod::Tournament) {
    const auto k = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(strength * 4.0)));
    std::uniform_int_distribution<std::size_t> pick(0, ranked.size() - 1);
    for (std::size_t c = 0; c < count; ++c) {
      std::size_t winner = pick(rng);
      for (std::size_t j = 1; j < k; ++j) winner = std::min(winner, pick(rng));
      out.push_back(winner);
    }
    return out;
  }
  std::vector<double> w = selection_weights(ranked, method, strength);
  if (std::all_of(w.begin(), w.end(), [](double v) { return v <= 0.0; })) w.assign(w.size(), 1.0);
  for (std::size_t c = 0; c < count; ++c) out.push_back(sample_index(w, rng));
  return out;
}

std::vector<double> survival_weights(std::size_t pool, double strength) {
  std::vector<double> w(pool);
  for (std::size_t r = 1; r <= pool; ++r) {
    const double d = std::exp(strength * (static_cast<double>(r) - static_cast<double>(pool)));
    w[r - 1] = 1.0 / (d + 1.0);
  }
  return w;
}

std::vector<std::size_t> select_survivors(const std::vector<Hypothesis>& ranked, std::size_t mu,
                                          SelectionMethod method, double strength, Rng& rng) {
  if (ranked.size() < mu) throw Error("survivor pool is smaller than the population size");
  if (mu == 0) return {};
  std::vector<double> w = method == SelectionMethod::Rank
                              ? survival_weights(ranked.size(), strength)
                              : selection_weights(ranked, SelectionMethod::Fitness, strength);
  std::vector<std::size_t> kept{0};
  w[0] = 0.0;
  while (kept.size() < mu) {
    if (std::all_of(w.begin(), w.end(), [](double v) { return v <= 0.0; })) {
      // Only zero weights left: fall back to uniform over the remaining entries.
      for (std::size_t i = 0; i < w.size(); ++i)
        if (std::find(kept.begin(), kept.end(), i) == kept.end()) w[i] = 1.0;
    }
    const std::size_t k = sample_index(w, rng);
    kept.push_back(k);
    w[k] = 0.0;
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

Hypothesis modify_hypothesis(const Hypothesis& h, double tau, const Problem& p,
                             SearchDistributions& dist, Rng& rng, ModifyStats* stats,
                             std::optional<double> forced_rate) {
  Hypothesis start = h;
  if (!start.fitness) {
    const Evaluation e = evaluate(start, p.target, p.weights);
    start.fitness = e.fitness;
    start.divergence = e.divergence;
  }
  Hypothesis best = start, current = start, cand = start;
  const std::size_t n = start.circuit.n_qubits();
  const std::size_t len_idx = dist.search_len.sample(rng);
  const std::size_t steps = len_idx + 1;
  const GateSampler sampler = dist.sampler(p.gate_set);

  for (std::size_t step = 0; step < steps; ++step) {
    const std::size_t type_idx = dist.search_type.sample(rng);
    const bool depth = dist.search_type.domain()[type_idx] == "depth";
    const std::size_t rate_idx = dist.mutation_rate.sample(rng);
    const double rate = forced_rate ? *forced_rate : std::stod(dist.mutation_rate.domain()[rate_idx]);

    Circuit circuit = current.circuit;
    std::vector<std::size_t> used_types;
    std::vector<GateSpec> drawn;
    if (circuit.empty() && rate > 0.0) {
      circuit = mutate(circuit, 0, MutationType::Insert, sampler, rng).circuit;
      used_types.push_back(static_cast<std::size_t>(MutationType::Insert));
      drawn.push_back(circuit.gates()[0]);
    } else {
      // Back to front, so inserts and deletes leave unvisited positions in place.
      for (std::size_t pos = circuit.size(); pos-- > 0;) {
        if (!(uniform01(rng) < rate)) continue;
        const std::size_t mt = dist.mutation_type.sample(rng);
        const MutationType type = parse_mutation(dist.mutation_type.domain()[mt]);
        MutationResult r = mutate(circuit, pos, type, sampler, rng);
        if (!r.applied) continue;
        circuit = std::move(r.circuit);
        used_types.push_back(mt);
        if (type != MutationType::Delete) drawn.push_back(circuit.gates()[pos]);
      }
    }

    std::size_t opt_idx = 0;
    if (used_types.empty()) {
      cand = current;
    } else {
      cand = current;
      cand.circuit = std::move(circuit);
      opt_idx = dist.optimizer.sample(rng);
      cand = optimize_parameters(cand, p, dist.optimizer.domain()[opt_idx], p.optimizer_budget);
    }
    if (stats) ++stats->steps;

    const double f_cand = *cand.fitness, f_cur = *current.fitness;
    if (f_cand > f_cur) {
      if (stats) ++stats->improved_steps;
      dist.search_type.reward(type_idx);
      if (!forced_rate) dist.mutation_rate.reward(rate_idx);
      for (std::size_t mt : used_types) dist.mutation_type.reward(mt);
      if (!used_types.empty()) dist.optimizer.reward(opt_idx);
      for (const GateSpec& g : drawn) {
        const auto it = std::find(p.gate_set.begin(), p.gate_set.end(), g.type);
        if (it != p.gate_set.end())
          dist.gates.reward(static_cast<std::size_t>(it - p.gate_set.begin()));
        dist.qubits.reward(qubit_slot(g, n));
      }
    }
    if (f_cand > *best.fitness) best = cand;
    if (depth && uniform01(rng) < acceptance_probability(f_cur, f_cand, tau)) {
      if (f_cand < f_cur && stats) ++stats->accepted_inferior;
      current = cand;
    }
  }
  if (uniform01(rng) < acceptance_probability(*best.fitness, *cand.fitness, tau)) {
    if (*cand.fitness < *best.fitness && stats) ++stats->accepted_inferior;
    best = cand;
  }
  if (*best.fitness > *start.fitness) dist.search_len.reward(len_idx);
  return best;
}

Hypothesis random_hypothesis(const Problem& p, SearchDistributions& dist, Rng& rng) {
  if (p.min_gates > p.max_gates) throw Error("min_gates exceeds max_gates");
  Hypothesis h;
  h.state_qubits = p.state_qubits;
  h.emission_qubits = p.emission_qubits;
  h.symbol_map = p.symbol_map;
  h.rho0_kind = p.rho0_kind;
  const std::size_t n = p.n_qubits();
  const std::size_t count =
      std::uniform_int_distribution<std::size_t>(p.min_gates, p.max_gates)(rng);
  const GateSampler sampler = dist.sampler(p.gate_set);
  std::vector<GateSpec> gates;
  for (std::size_t i = 0; i < count; ++i) gates.push_back(random_gate(sampler, n, rng));
  h.circuit = Circuit(n, std::move(gates));
  const std::size_t opt = dist.optimizer.sample(rng);
  return optimize_parameters(h, p, dist.optimizer.domain()[opt], p.optimizer_budget);
}

LearningReport evolve(const Problem& problem, const HyperParams& hp) {
  const auto clock_start = std::chrono::steady_clock::now();
  Problem p = problem;
  if (p.target.size() > hp.n_max)
    p.target.erase(p.target.begin() + static_cast<std::ptrdiff_t>(hp.n_max), p.target.end());
  if (hp.mu < 2) throw Error("population size mu must be at least 2");
  if (hp.lambda < 1) throw Error("offspring size lambda must be at least 1");
  if (hp.gamma_bandit < 0.0 || hp.gamma_bandit > 1.0) throw Error("gamma must lie in [0, 1]");
  if ((std::size_t{1} << p.emission_qubits) < p.alphabet_size())
    throw DimensionError("emission register is smaller than the alphabet");

  SearchDistributions dist(p.gate_set, p.n_qubits(), hp.optimizers, hp.max_search_len);
  LearningReport report;
  report.bandit_names = dist.names();
  report.bandit_traces.resize(report.bandit_names.size());
  for (const AdaptiveDistribution* d : dist.all()) report.bandit_domains.push_back(d->domain());

  std::vector<Hypothesis> pop(hp.mu);
  parallel_for(hp.mu, hp.threads, [&](std::size_t i) {
    SearchDistributions local = dist;
    Rng rng = stream(hp.seed, {0, i});
    pop[i] = random_hypothesis(p, local, rng);
  });
  rank_population(pop);

  auto record = [&](std::size_t g, double tau, std::size_t accepted, std::size_t improved) {
    GenerationStats s;
    s.generation = g;
    s.best_fitness = *pop[0].fitness;
    double sum = 0.0;
    for (const Hypothesis& h : pop) sum += *h.fitness;
    s.mean_fitness = sum / static_cast<double>(pop.size());
    s.best_divergence = pop[0].divergence.value_or(0.0);
    s.temperature = tau;
    s.accepted_inferior = accepted;
    s.improved_children = improved;
    report.generations.push_back(s);
    const auto dists = dist.all();
    for (std::size_t d = 0; d < dists.size(); ++d) report.bandit_traces[d].push_back(dists[d]->probs());
  };
  auto done = [&]() {
    if (*pop[0].fitness >= hp.target_fitness) return true;
    return hp.target_divergence && pop[0].divergence.value_or(1.0) <= *hp.target_divergence;
  };

  std::size_t t = 0, stagnant = 0;
  record(0, temperature(0), 0, 0);
  for (std::size_t g = 0; g < hp.g_max && !done(); ++g) {
    const double tau = temperature(t);
    Rng grng = stream(hp.seed, {g + 1});
    const std::size_t sel_t = dist.selection_type.sample(grng);
    const std::size_t sel_s = dist.selection_strength.sample(grng);
    const std::vector<std::size_t> parents =
        select_parents(pop, hp.lambda, method_from(dist.selection_type.domain()[sel_t]),
                       std::stod(dist.selection_strength.domain()[sel_s]), grng);

    std::vector<Hypothesis> children(hp.lambda);
    std::vector<SearchDistributions> child_dist(hp.lambda, dist);
    for (SearchDistributions& d : child_dist) d.clear_rewards();
    std::vector<ModifyStats> stats(hp.lambda);
    parallel_for(hp.lambda, hp.threads, [&](std::size_t i) {
      Rng rng = stream(hp.seed, {g + 1, i});
      children[i] = modify_hypothesis(pop[parents[i]], tau, p, child_dist[i], rng, &stats[i]);
    });

    std::size_t accepted = 0, improved = 0;
    for (std::size_t i = 0; i < hp.lambda; ++i) {
      dist.add_rewards(child_dist[i]);
      accepted += stats[i].accepted_inferior;
      if (*children[i].fitness > *pop[parents[i]].fitness) {
        ++improved;
        dist.selection_type.reward(sel_t);
        dist.selection_strength.reward(sel_s);
      }
    }

    const double old_best = *pop[0].fitness;
    double old_mean = 0.0;
    for (const Hypothesis& h : pop) old_mean += *h.fitness / static_cast<double>(pop.size());

    std::vector<Hypothesis> pool = pop;
    for (Hypothesis& c : children) pool.push_back(std::move(c));
    rank_population(pool);
    const std::size_t surv_t = dist.survival_type.sample(grng);
    const std::size_t surv_s = dist.survival_strength.sample(grng);
    const std::vector<std::size_t> kept =
        select_survivors(pool, hp.mu, method_from(dist.survival_type.domain()[surv_t]),
                         std::stod(dist.survival_strength.domain()[surv_s]), grng);
    pop.clear();
    for (std::size_t k : kept) pop.push_back(std::move(pool[k]));

    double new_mean = 0.0;
    for (const Hypothesis& h : pop) new_mean += *h.fitness / static_cast<double>(pop.size());
    if (new_mean > old_mean) {
      dist.survival_type.reward(surv_t);
      dist.survival_strength.reward(surv_s);
    }

    if (*pop[0].fitness > old_best) {
      stagnant = 0;
    } else {
      ++stagnant;
    }
    if (stagnant >= hp.prog_window) {
      t = 0;
      stagnant = 0;
    } else {
      ++t;
    }
    dist.adapt(hp.gamma_bandit);
    record(g + 1, tau, accepted, improved);
  }

  report.reached_target = done();
  report.best = pop[0];
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
  return report;
}

std::string ansatz_template_name(AnsatzTemplate t) {
  return t == AnsatzTemplate::RealAmplitudes ? "real_amplitudes" : "efficient_su2";
}

AnsatzTemplate parse_ansatz_template(const std::string& name) {
  if (name == "real_amplitudes" || name == "RealAmplitudes") return AnsatzTemplate::RealAmplitudes;
  if (name == "efficient_su2" || name == "EfficientSU2") return AnsatzTemplate::EfficientSU2;
  throw Error("unknown ansatz template '" + name + "'");
}

Circuit build_ansatz(const AnsatzSpec& spec) {
  const std::size_t n = spec.state_qubits + spec.emission_qubits;
  if (spec.kind == AnsatzTemplate::RealAmplitudes)
    return real_amplitudes(n, spec.reps, spec.entanglement);
  return efficient_su2(n, spec.reps, spec.entanglement, spec.rotations);
}

double ansatz_cost(const std::vector<DistributionTable>& target,
                   const std::vector<DistributionTable>& current) {
  if (target.size() != current.size()) throw DimensionError("ansatz_cost: length mismatch");
  double cost = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const DistributionTable& a = target[i];
    const DistributionTable& b = current[i];
    if (a.alphabet_size() != b.alphabet_size() || a.length() != b.length())
      throw DimensionError("ansatz_cost: tables differ in shape");
    const double l = static_cast<double>(a.length());
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double d = a[k] - b[k];
      cost += l * d * d;
    }
  }
  return cost;
}

AnsatzResult train_ansatz(const AnsatzSpec& spec, const std::vector<DistributionTable>& target,
                          const std::string& optimizer_label, const std::vector<double>& x0,
                          std::size_t budget) {
  if (target.empty()) throw Error("ansatz training needs target tables");
  const std::size_t m = target.front().alphabet_size();
  Hypothesis h;
  h.state_qubits = spec.state_qubits;
  h.emission_qubits = spec.emission_qubits;
  h.symbol_map = spec.symbol_map;
  h.rho0_kind = spec.rho0_kind;
  const Circuit shape = build_ansatz(spec);
  if (x0.size() != shape.num_params()) throw DimensionError("x0 length does not match the ansatz");

  auto cost_at = [&](const std::vector<double>& x) {
    Hypothesis trial = h;
    trial.circuit = shape.with_params(x);
    return ansatz_cost(target, hypothesis_distributions(trial, m, target.size()));
  };
  AnsatzResult out;
  if (x0.empty()) {
    out.cost = cost_at(x0);
    out.evaluations = 1;
    out.trace = {out.cost};
    return out;
  }
  ObjectiveSpec obj;
  obj.arity = x0.size();
  obj.budget = std::max<std::size_t>(budget, 1);
  obj.evaluate = cost_at;
  const OptResult r = lookup_optimizer(optimizer_label)(obj, x0, OptimizerOptions{});
  out.params = r.best_params;
  out.cost = r.best_value;
  out.evaluations = r.evaluations;
  out.trace = r.trace;
  return out;
}

std::vector<AnsatzResult> train_ansatz_restarts(const AnsatzSpec& spec,
                                                const std::vector<DistributionTable>& target,
                                                const std::string& optimizer_label,
                                                std::size_t restarts, std::size_t budget,
                                                std::uint64_t seed, int threads) {
  const std::size_t arity = build_ansatz(spec).num_params();
  std::vector<AnsatzResult> runs(restarts);
  parallel_for(restarts, threads, [&](std::size_t r) {
    Rng rng = stream(seed, {r});
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::vector<double> x0(arity);
    for (double& v : x0) v = angle(rng);
    runs[r] = train_ansatz(spec, target, optimizer_label, x0, budget);
    runs[r].restart = r;
  });
  std::stable_sort(runs.begin(), runs.end(),
                   [](const AnsatzResult& a, const AnsatzResult& b) { return a.cost < b.cost; });
  return runs;
}

}  // namespace qhmm
