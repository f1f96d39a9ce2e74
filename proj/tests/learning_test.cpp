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
#include <numeric>

#include <gtest/gtest.h>

#include "qhmm/experiments.hpp"
#include "qhmm/learning.hpp"
#include "test_util.hpp"

namespace qhmm {
namespace {

using testing::kPi;

// Exact tables of a hypothesis through its Kraus family and the chain oracle.
std::vector<DistributionTable> oracle_tables(const Hypothesis& h, std::size_t m, std::size_t n) {
  const ComplexMatrix u = compile(h.circuit).matrix();
  const auto ops = kraus_from_unitary(UnitaryOperator::from_matrix(u), h.dim_s(), h.dim_e(), 0);
  std::vector<std::vector<ComplexMatrix>> groups(m);
  for (std::size_t e = 0; e < ops.size(); ++e)
    groups[h.symbol_map.empty() ? e % m : static_cast<std::size_t>(h.symbol_map[e])].push_back(ops[e]);
  const ComplexMatrix rho = initial_state(h.rho0_kind, h.dim_s()).matrix();
  std::vector<DistributionTable> out;
  for (std::size_t t = 1; t <= n; ++t) {
    DistributionTable d(m, t);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = testing::chain_probability(groups, rho, d.sequence_at(i));
    out.push_back(d);
  }
  return out;
}

Hypothesis ry_hypothesis(double angle) {
  Hypothesis h;
  h.circuit = Circuit(2, {GateSpec::single(GateType::RY, 1, angle)});
  return h;
}

std::vector<Hypothesis> ranked_population(const std::vector<double>& fitness) {
  std::vector<Hypothesis> pop;
  for (double f : fitness) {
    Hypothesis h;
    h.fitness = f;
    pop.push_back(h);
  }
  return pop;
}

TEST(HypothesisModel, DistributionsMatchKrausOracle) {
  Rng rng = stream(4);
  GateSampler s;
  s.gate_set = {GateType::X, GateType::RY, GateType::RX, GateType::H};
  for (int trial = 0; trial < 10; ++trial) {
    Hypothesis h;
    std::vector<GateSpec> g;
    for (int i = 0; i < 6; ++i) g.push_back(random_gate(s, 2, rng));
    h.circuit = Circuit(2, g);
    h.rho0_kind = trial % 2 == 0 ? Rho0Kind::MaximallyMixed : Rho0Kind::Ground;
    const auto got = hypothesis_distributions(h, 2, 4);
    const auto want = oracle_tables(h, 2, 4);
    for (std::size_t t = 0; t < 4; ++t)
      for (std::size_t i = 0; i < got[t].size(); ++i) EXPECT_NEAR(got[t][i], want[t][i], 1e-12);
  }
}

TEST(HypothesisModel, InitialStates) {
  EXPECT_LT(max_abs_entry(initial_state(Rho0Kind::MaximallyEntangled, 2).matrix() -
                          ComplexMatrix::Identity(2, 2) / 2.0),
            1e-15);
  EXPECT_NEAR(initial_state(Rho0Kind::Ground, 4).matrix()(0, 0).real(), 1.0, 1e-15);
  EXPECT_EQ(parse_rho0_kind(rho0_kind_name(Rho0Kind::MaximallyMixed)), Rho0Kind::MaximallyMixed);
}

TEST(Fitness, ClosedForms) {
  // RY(pi/2) on the emission qubit from I/2 gives an i.i.d. fair coin.
  const Hypothesis h = ry_hypothesis(kPi / 2.0);
  std::vector<DistributionTable> coin;
  for (std::size_t t = 1; t <= 4; ++t)
    coin.emplace_back(2, t, std::vector<double>(std::size_t{1} << t, 1.0 / double(std::size_t{1} << t)));
  const FitnessWeights w;
  EXPECT_NEAR(complexity(h, w), 0.01 * 2.0 / 4.0, 1e-15);
  EXPECT_NEAR(fitness(h, coin, w), -0.005, 1e-12);
  EXPECT_NEAR(fitness(h, coin, FitnessWeights{0.0, 0.0}), 0.0, 1e-12);

  Hypothesis cx = h;
  cx.circuit = Circuit(2, {GateSpec::controlled(GateType::CX, 0, 1)});
  EXPECT_NEAR(complexity(cx, w), 0.01 + 0.005, 1e-15);

  const Evaluation e = evaluate(ry_hypothesis(0.3), coin, w);
  EXPECT_LT(e.fitness, 0.0);
  EXPECT_NEAR(e.fitness, -(e.divergence + 0.005), 1e-15);
  EXPECT_NEAR(e.divergence, divergence_avg(coin, oracle_tables(ry_hypothesis(0.3), 2, 4)), 1e-12);
}

TEST(Fitness, NeverPositiveOnRandomHypotheses) {
  const Problem p = market_problem(4);
  SearchDistributions d(p.gate_set, p.n_qubits(), {"nm"});
  Rng rng = stream(8);
  for (int i = 0; i < 30; ++i) {
    Problem quick = p;
    quick.optimizer_budget = 1;
    const Hypothesis h = random_hypothesis(quick, d, rng);
    EXPECT_LT(*h.fitness, 0.0);
    EXPECT_GE(h.circuit.size(), p.min_gates);
    EXPECT_LE(h.circuit.size(), p.max_gates);
    EXPECT_EQ(h.circuit.n_qubits(), 2u);
    EXPECT_NEAR(*h.fitness, fitness(h, p.target, p.weights), 1e-12);
  }
}

TEST(OptimizeParameters, ImprovesAndBudgetOne) {
  const Problem p = market_problem(3);
  const Hypothesis h = ry_hypothesis(0.2);
  const double f0 = fitness(h, p.target, p.weights);
  const Hypothesis one = optimize_parameters(h, p, "nm", 1);
  EXPECT_NEAR(*one.fitness, f0, 1e-15);
  for (const std::string& label : optimizer_labels()) {
    const Hypothesis fit = optimize_parameters(h, p, label, 200);
    EXPECT_GE(*fit.fitness, f0 - 1e-12) << label;
    // Lamarckian write-back: the circuit carries the fitted angle.
    EXPECT_NEAR(fitness(fit, p.target, p.weights), *fit.fitness, 1e-12) << label;
  }
  Hypothesis fixed;
  fixed.circuit = Circuit(2, {GateSpec::single(GateType::X, 1)});
  EXPECT_NEAR(*optimize_parameters(fixed, p, "nm", 100).fitness,
              fitness(fixed, p.target, p.weights), 1e-15);
}

TEST(RandomHypothesis, FixedGateCountAndRepeatable) {
  Problem p = market_problem(3);
  p.min_gates = p.max_gates = 1;
  p.optimizer_budget = 5;
  SearchDistributions d(p.gate_set, p.n_qubits(), {"nm"});
  Rng a = stream(2), b = stream(2);
  for (int i = 0; i < 20; ++i) {
    const Hypothesis x = random_hypothesis(p, d, a);
    const Hypothesis y = random_hypothesis(p, d, b);
    EXPECT_EQ(x.circuit.size(), 1u);
    EXPECT_EQ(x.circuit.gates(), y.circuit.gates());
  }
}

TEST(Temperature, Values) {
  EXPECT_DOUBLE_EQ(temperature(0), 1.0);
  EXPECT_NEAR(temperature(1), std::pow(2.0, -0.25), 1e-15);
  EXPECT_NEAR(temperature(100), std::pow(1001.0, -0.25), 1e-15);
  EXPECT_NEAR(temperature(100), 0.1778, 1e-4);
  for (std::size_t t = 1; t < 500; ++t) EXPECT_LT(temperature(t), temperature(t - 1));
}

TEST(Acceptance, Values) {
  EXPECT_DOUBLE_EQ(acceptance_probability(-0.2, -0.2, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(acceptance_probability(-0.2, -0.1, 0.3), 1.0);
  EXPECT_NEAR(acceptance_probability(-0.2, -0.3, 1.0), std::exp(-0.3), 1e-15);
  EXPECT_NEAR(acceptance_probability(-0.2, -0.3, 1.0), 0.7408, 1e-4);
  EXPECT_LT(acceptance_probability(-0.2, -0.3, 1e-4), 1e-100);
  EXPECT_DOUBLE_EQ(acceptance_probability(0.0, -0.3, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(acceptance_probability(-0.2, -0.3, 0.0), 0.0);
}

TEST(Acceptance, MonotoneInGapAndTemperature) {
  for (double tau : {0.1, 0.5, 1.0}) {
    double prev = 1.0;
    for (double gap = 0.01; gap < 0.5; gap += 0.01) {
      const double p = acceptance_probability(-0.2, -0.2 - gap, tau);
      EXPECT_LT(p, prev);
      EXPECT_GE(p, 0.0);
      prev = p;
    }
  }
  EXPECT_LT(acceptance_probability(-0.2, -0.3, 0.2), acceptance_probability(-0.2, -0.3, 0.8));
}

TEST(Bandit, Examples) {
  AdaptiveDistribution d({"a", "b"});
  d.reward(0, 3.0);
  d.reward(1, 1.0);
  const AdaptiveDistribution u = bandit_update(d, 0.0);
  EXPECT_NEAR(u.probs()[0], 0.75, 1e-15);
  EXPECT_NEAR(u.probs()[1], 0.25, 1e-15);
  EXPECT_EQ(u.rewards(), (std::vector<double>{0.0, 0.0}));

  const AdaptiveDistribution g1 = bandit_update(d, 1.0);
  EXPECT_NEAR(g1.probs()[0], 0.5, 1e-15);

  AdaptiveDistribution skew({"a", "b", "c"});
  skew.set_probs({0.7, 0.2, 0.1});
  const AdaptiveDistribution reset = bandit_update(skew, 0.3);
  for (double p : reset.probs()) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);

  EXPECT_THROW(skew.set_probs({0.5, 0.5, 0.5}), InvariantError);
  EXPECT_THROW(bandit_update(d, 1.5), Error);
}

TEST(Bandit, FloorAndNormalization) {
  Rng rng = stream(5);
  AdaptiveDistribution d({"a", "b", "c", "d", "e"});
  for (int round = 0; round < 50; ++round) {
    for (int k = 0; k < 10; ++k) d.reward(rng() % 2, 1.0);
    d = bandit_update(d, 0.2);
    EXPECT_NEAR(std::accumulate(d.probs().begin(), d.probs().end(), 0.0), 1.0, 1e-12);
    for (double p : d.probs()) EXPECT_GE(p, 0.2 / 5.0 - 1e-15);
  }
}

TEST(SearchDistributionsTest, Domains) {
  const SearchDistributions d({GateType::X, GateType::RY}, 2, {"tnc", "cbla", "bfsg", "gc", "slsqp"});
  EXPECT_EQ(d.all().size(), 11u);
  EXPECT_EQ(d.names().size(), 11u);
  EXPECT_EQ(d.qubits.size(), 4u);
  EXPECT_EQ(d.search_len.size(), 10u);
  EXPECT_EQ(d.mutation_type.domain(), (std::vector<std::string>{"gte", "qbt", "rpl", "dlt", "ins"}));
  EXPECT_EQ(d.optimizer.size(), 5u);
}

TEST(Selection, RankWeights) {
  const auto two = selection_weights(ranked_population({-0.1, -0.2}), SelectionMethod::Rank, 1.0);
  EXPECT_EQ(two, (std::vector<double>{1.0, 0.0}));
  Rng rng = stream(1);
  for (std::size_t i : select_parents(ranked_population({-0.1, -0.2}), 50, SelectionMethod::Rank, 1.0, rng))
    EXPECT_EQ(i, 0u);

  const auto flat = selection_weights(ranked_population({-0.1, -0.2, -0.3, -0.4}), SelectionMethod::Rank, 0.0);
  EXPECT_EQ(flat, (std::vector<double>{1.0, 1.0, 1.0, 0.0}));
}

TEST(Selection, RankChiSquare) {
  const std::size_t mu = 10;
  std::vector<double> f(mu);
  for (std::size_t i = 0; i < mu; ++i) f[i] = -0.1 * (i + 1.0);
  const auto pop = ranked_population(f);
  std::vector<double> expect(mu);
  double z = 0.0;
  for (std::size_t i = 0; i < mu; ++i) z += expect[i] = std::pow(double(mu - (i + 1)), 0.5);
  Rng rng = stream(11);
  const std::size_t draws = 20000;
  std::vector<double> counts(mu, 0.0);
  for (std::size_t i : select_parents(pop, draws, SelectionMethod::Rank, 0.5, rng)) counts[i] += 1.0;
  EXPECT_EQ(counts[mu - 1], 0.0);
  double chi2 = 0.0;
  for (std::size_t i = 0; i + 1 < mu; ++i) {
    const double e = draws * expect[i] / z;
    chi2 += (counts[i] - e) * (counts[i] - e) / e;
  }
  EXPECT_LT(chi2, 20.09);  // 8 degrees of freedom, alpha = 0.01
}

TEST(Selection, FitnessAndTournament) {
  const auto pop = ranked_population({-0.1, -0.3, -0.5});
  const auto w = selection_weights(pop, SelectionMethod::Fitness, 1.0);
  EXPECT_NEAR(w[0], 0.4, 1e-11);
  EXPECT_NEAR(w[1], 0.2, 1e-11);
  EXPECT_NEAR(w[2], 0.0, 1e-11);

  // k = 4 candidates: P(best rank 0) = 1 - (2/3)^4.
  Rng rng = stream(12);
  const std::size_t draws = 30000;
  double zero = 0.0;
  for (std::size_t i : select_parents(pop, draws, SelectionMethod::Tournament, 1.0, rng))
    zero += i == 0 ? 1.0 : 0.0;
  const double p = 1.0 - std::pow(2.0 / 3.0, 4);
  EXPECT_NEAR(zero / draws, p, 4.0 * std::sqrt(p * (1 - p) / draws));
  EXPECT_THROW(select_parents({}, 1, SelectionMethod::Rank, 1.0, rng), Error);
}

TEST(Survival, Weights) {
  for (double w : survival_weights(6, 0.0)) EXPECT_DOUBLE_EQ(w, 0.5);
  const auto w = survival_weights(40, 1.0);
  for (std::size_t i = 1; i < w.size(); ++i) EXPECT_LE(w[i], w[i - 1]);
  const auto small = survival_weights(10, 1.0);
  for (std::size_t i = 1; i < small.size(); ++i) EXPECT_LT(small[i], small[i - 1]);
  EXPECT_DOUBLE_EQ(w.back(), 0.5);
  EXPECT_NEAR(w.front(), 1.0, 1e-15);
  const auto steep = survival_weights(40, 50.0);
  EXPECT_NEAR(steep[38], 1.0, 1e-15);
}

TEST(Survival, ElitistDistinctAndSorted) {
  std::vector<double> f(40);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = -0.01 * (i + 1.0);
  const auto pool = ranked_population(f);
  Rng rng = stream(13);
  for (auto method : {SelectionMethod::Rank, SelectionMethod::Fitness}) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto kept = select_survivors(pool, 20, method, 0.5, rng);
      ASSERT_EQ(kept.size(), 20u);
      EXPECT_EQ(kept[0], 0u);
      for (std::size_t i = 1; i < kept.size(); ++i) EXPECT_LT(kept[i - 1], kept[i]);
    }
  }
  EXPECT_THROW(select_survivors(pool, 41, SelectionMethod::Rank, 1.0, rng), Error);
}

TEST(Modify, ForcedRateZeroReturnsInput) {
  const Problem p = market_problem(3);
  SearchDistributions d(p.gate_set, p.n_qubits(), {"nm"});
  const Hypothesis h = optimize_parameters(ry_hypothesis(0.7), p, "nm", 50);
  Rng rng = stream(3);
  const Hypothesis out = modify_hypothesis(h, 1.0, p, d, rng, nullptr, 0.0);
  EXPECT_EQ(out.circuit.gates(), h.circuit.gates());
  EXPECT_DOUBLE_EQ(*out.fitness, *h.fitness);
}

TEST(Modify, EmptyCircuitGetsOneGate) {
  Problem p = market_problem(3);
  SearchDistributions d(p.gate_set, p.n_qubits(), {"nm"});
  d.search_len.set_probs({1, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  Hypothesis empty;
  empty.circuit = Circuit(2);
  Rng rng = stream(4);
  ModifyStats stats;
  // A huge temperature accepts any candidate, so the inserted gate survives.
  const Hypothesis out = modify_hypothesis(empty, 1e12, p, d, rng, &stats, 1.0);
  EXPECT_EQ(stats.steps, 1u);
  EXPECT_EQ(out.circuit.size(), 1u);

  // At a normal temperature the result is the input or the one-gate child.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng r = stream(40 + seed);
    ModifyStats st;
    const Hypothesis o = modify_hypothesis(empty, 1.0, p, d, r, &st, 1.0);
    ASSERT_LE(o.circuit.size(), 1u);
    const double f_empty = fitness(empty, p.target, p.weights);
    if (o.circuit.empty()) EXPECT_DOUBLE_EQ(*o.fitness, f_empty);
    else if (*o.fitness < f_empty) EXPECT_GE(st.accepted_inferior, 1u);
  }
}

TEST(Modify, InvariantsOverManyRuns) {
  Problem p = market_problem(3);
  p.optimizer_budget = 30;
  SearchDistributions d(p.gate_set, p.n_qubits(), {"tnc", "cbla", "bfsg", "gc", "slsqp"}, 3);
  Rng rng = stream(6);
  double parents = 0.0, kids = 0.0;
  for (int i = 0; i < 40; ++i) {
    const Hypothesis h = random_hypothesis(p, d, rng);
    const Hypothesis c = modify_hypothesis(h, temperature(i % 5), p, d, rng);
    EXPECT_EQ(c.circuit.n_qubits(), 2u);
    EXPECT_LE(*c.fitness, 0.0);
    EXPECT_NEAR(*c.fitness, fitness(c, p.target, p.weights), 1e-12);
    parents += *h.fitness;
    kids += *c.fitness;
  }
  // Soft check: children are not much worse on average.
  EXPECT_GE(kids / 40.0, parents / 40.0 - 0.05);
}

TEST(Evolve, ZeroGenerationsReturnsBestRandom) {
  Problem p = market_problem(3);
  p.optimizer_budget = 10;
  HyperParams hp;
  hp.mu = 6;
  hp.lambda = 6;
  hp.g_max = 0;
  hp.threads = 1;
  const LearningReport r = evolve(p, hp);
  ASSERT_EQ(r.generations.size(), 1u);
  EXPECT_EQ(r.generations[0].generation, 0u);
  EXPECT_DOUBLE_EQ(r.generations[0].best_fitness, *r.best.fitness);
  EXPECT_GE(r.generations[0].best_fitness, r.generations[0].mean_fitness);
}

TEST(Evolve, SerialAndParallelAgreeAndBestIsMonotone) {
  Problem p = market_problem(3);
  p.optimizer_budget = 20;
  HyperParams hp;
  hp.mu = 6;
  hp.lambda = 6;
  hp.g_max = 4;
  hp.max_search_len = 3;
  hp.seed = 21;
  hp.threads = 1;
  hp.target_fitness = 0.0;
  const LearningReport serial = evolve(p, hp);
  hp.threads = 3;
  const LearningReport parallel = evolve(p, hp);
  ASSERT_EQ(serial.generations.size(), parallel.generations.size());
  for (std::size_t g = 0; g < serial.generations.size(); ++g) {
    EXPECT_EQ(serial.generations[g].best_fitness, parallel.generations[g].best_fitness);
    EXPECT_EQ(serial.generations[g].mean_fitness, parallel.generations[g].mean_fitness);
    if (g > 0) EXPECT_GE(serial.generations[g].best_fitness, serial.generations[g - 1].best_fitness);
    EXPECT_LE(serial.generations[g].temperature, 1.0);
  }
  EXPECT_EQ(serial.best.circuit.gates(), parallel.best.circuit.gates());
  EXPECT_EQ(serial.bandit_traces, parallel.bandit_traces);
  EXPECT_EQ(serial.bandit_names.size(), 11u);
}

TEST(Evolve, Validation) {
  Problem p = market_problem(3);
  HyperParams hp;
  hp.mu = 1;
  EXPECT_THROW(evolve(p, hp), Error);
  hp.mu = 4;
  hp.gamma_bandit = 2.0;
  EXPECT_THROW(evolve(p, hp), Error);
}

TEST(AnsatzCost, ClosedForms) {
  std::vector<DistributionTable> a{DistributionTable(2, 1, {0.5, 0.5}),
                                   DistributionTable(2, 2, {0.25, 0.25, 0.25, 0.25})};
  EXPECT_DOUBLE_EQ(ansatz_cost(a, a), 0.0);
  auto b = a;
  b[1][2] += 0.1;
  EXPECT_NEAR(ansatz_cost(a, b), 0.02, 1e-15);
}

TEST(Ansatz, BuildAndTrain) {
  const AnsatzSpec ms = market_ansatz_spec();
  EXPECT_EQ(build_ansatz(ms).num_params(), 2u);
  const AnsatzSpec mon = monras_ansatz_spec();
  EXPECT_EQ(build_ansatz(mon).num_params(), 18u);
  EXPECT_EQ(parse_ansatz_template(ansatz_template_name(AnsatzTemplate::EfficientSU2)),
            AnsatzTemplate::EfficientSU2);

  const auto target = distributions_upto(models::monras(), 2);
  const std::vector<double> x0(18, 0.3);
  const AnsatzResult r = train_ansatz(mon, target, "nm", x0, 600);
  EXPECT_GT(r.trace.front(), 0.0);
  EXPECT_LT(r.cost, r.trace.front());
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i], r.trace[i - 1]);
}

TEST(Ansatz, RestartsAreSortedAndThreadIndependent) {
  const AnsatzSpec ms = market_ansatz_spec();
  const auto target = distributions_upto(fixtures::market(), kMarketAnsatzLengths);
  const auto a = train_ansatz_restarts(ms, target, "nm", 4, 200, 5, 1);
  const auto b = train_ansatz_restarts(ms, target, "nm", 4, 200, 5, 2);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].params, b[i].params);
    if (i > 0) EXPECT_LE(a[i - 1].cost, a[i].cost);
  }
}

}  // namespace
}  // namespace qhmm
