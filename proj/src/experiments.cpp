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

#include "qhmm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace qhmm {

namespace {

constexpr double kTwoPi = 6.283185307179586;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Hypothesis ansatz_hypothesis(const AnsatzSpec& spec, const std::vector<double>& params) {
  Hypothesis h;
  h.state_qubits = spec.state_qubits;
  h.emission_qubits = spec.emission_qubits;
  h.symbol_map = spec.symbol_map;
  h.rho0_kind = spec.rho0_kind;
  h.circuit = build_ansatz(spec).with_params(params);
  return h;
}

std::string trace_csv(const std::vector<AnsatzResult>& runs) {
  std::string out = "restart,evaluation,best_cost\n";
  for (const AnsatzResult& r : runs)
    for (std::size_t i = 0; i < r.trace.size(); ++i)
      out += std::to_string(r.restart) + "," + std::to_string(i + 1) + "," + format_double(r.trace[i]) + "\n";
  return out;
}

ExperimentReport run_table2() {
  ExperimentReport rep;
  const QhmmKraus k = to_kraus(models::amplitude_damping(std::acos(-1.0) / 2.0));
  const HankelMatrix h = hankel(table_function(distributions_upto(k, 4)), 2, 2, 2);
  const RealMatrix ref = amplitude_damping_hankel_reference();
  double worst = 0.0;
  std::string csv = "prefix,suffix,computed,reference\n";
  for (Eigen::Index i = 0; i < ref.rows(); ++i)
    for (Eigen::Index j = 0; j < ref.cols(); ++j) {
      worst = std::max(worst, std::abs(h.values(i, j) - ref(i, j)));
      const auto& pre = h.prefixes[static_cast<std::size_t>(i)];
      const auto& suf = h.suffixes[static_cast<std::size_t>(j)];
      csv += (pre.empty() ? "e" : format_sequence(pre)) + "," +
             (suf.empty() ? "e" : format_sequence(suf)) + "," + format_double(h.values(i, j)) + "," +
             format_double(ref(i, j)) + "\n";
    }
  rep.passed = worst <= 1e-12;
  rep.summary = Json{{"entries", ref.size()}, {"max_abs_error", worst}, {"tolerance", 1e-12}};
  rep.files.emplace_back("table2.csv", csv);
  return rep;
}

ExperimentReport run_ansatz(const AnsatzSpec& spec, const std::vector<DistributionTable>& target,
                            double threshold, const ExperimentOptions& opts) {
  ExperimentReport rep;
  const std::vector<AnsatzResult> runs =
      train_ansatz_restarts(spec, target, "nm", opts.restarts, opts.ansatz_budget, opts.seed, opts.threads);
  const AnsatzResult& best = runs.front();
  rep.passed = best.cost <= threshold;
  Json costs = Json::array();
  std::vector<AnsatzResult> by_restart = runs;
  std::sort(by_restart.begin(), by_restart.end(),
            [](const AnsatzResult& a, const AnsatzResult& b) { return a.restart < b.restart; });
  for (const AnsatzResult& r : by_restart) costs.push_back(r.cost);
  rep.summary = Json{{"template", ansatz_template_name(spec.kind)},
                     {"reps", spec.reps},
                     {"entanglement", entanglement_name(spec.entanglement)},
                     {"target_lengths", target.size()},
                     {"restarts", opts.restarts},
                     {"best_cost", best.cost},
                     {"best_restart", best.restart},
                     {"best_params", best.params},
                     {"restart_costs", costs},
                     {"threshold", threshold}};
  rep.files.emplace_back("training_curve.csv", trace_csv(by_restart));
  return rep;
}

ExperimentReport run_evo(const Problem& p, double threshold, const ExperimentOptions& opts,
                         std::size_t n_max) {
  ExperimentReport rep;
  Json runs = Json::array();
  std::string traces;
  for (std::size_t s = 0; s < opts.evo_seeds; ++s) {
    HyperParams hp;
    hp.mu = opts.mu;
    hp.lambda = opts.mu;
    hp.g_max = opts.g_max;
    hp.n_max = n_max;
    hp.seed = opts.seed + s;
    hp.threads = opts.threads;
    hp.target_divergence = threshold;
    const LearningReport r = evolve(p, hp);
    const double div = r.best.divergence.value_or(1.0);
    runs.push_back(Json{{"seed", hp.seed},
                        {"generations", r.generations.back().generation},
                        {"best_fitness", *r.best.fitness},
                        {"best_divergence", div},
                        {"reached", div <= threshold},
                        {"best", to_json(r.best, p.alphabet_size())}});
    traces += "# seed " + std::to_string(hp.seed) + "\n" + fitness_trace_csv(r);
    if (div <= threshold) {
      rep.passed = true;
      break;
    }
  }
  rep.summary = Json{{"threshold", threshold}, {"n_max", n_max}, {"mu", opts.mu},
                     {"g_max", opts.g_max}, {"runs", runs}};
  rep.files.emplace_back("fitness_trace.csv", traces);
  return rep;
}

}  // namespace

std::vector<LandscapeSample> landscape_walk(const Hypothesis& optimum, std::size_t alphabet_size,
                                            std::size_t n_max, std::size_t steps,
                                            double std_fraction, Rng& rng) {
  std::vector<LandscapeSample> out;
  if (steps == 0) return out;
  std::vector<double> x = optimum.circuit.params();
  if (x.empty()) throw Error("landscape walk needs a parameterized hypothesis");
  const ComplexMatrix u_star = compile(optimum.circuit).matrix();
  const std::vector<DistributionTable> ref = hypothesis_distributions(optimum, alphabet_size, n_max);
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Hypothesis h = optimum;
  for (std::size_t step = 0; step < steps; ++step) {
    const std::size_t i = pick(rng);
    const double sigma = x[i] == 0.0 ? std_fraction * kTwoPi : std_fraction * std::abs(x[i]);
    x[i] += sigma * gauss(rng);
    h.circuit = optimum.circuit.with_params(x);
    LandscapeSample s;
    s.op_distance = spectral_norm(u_star - compile(h.circuit).matrix());
    const std::vector<DistributionTable> d = hypothesis_distributions(h, alphabet_size, n_max);
    for (std::size_t n = 0; n < n_max; ++n) s.divergences.push_back(divergence_max(ref[n], d[n]));
    s.total = divergence_avg(ref, d);
    out.push_back(std::move(s));
  }
  return out;
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("pearson: series lengths differ");
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> landscape_correlation(const std::vector<LandscapeSample>& samples,
                                            double max_distance) {
  if (samples.size() < 30) throw Error("landscape correlation needs at least 30 samples");
  std::vector<double> div, dist;
  for (const LandscapeSample& s : samples) {
    if (s.op_distance > max_distance) continue;
    div.push_back(s.total);
    dist.push_back(s.op_distance);
  }
  if (div.size() < 30) return std::nullopt;
  return pearson(div, dist);
}

bool smoothness_bound_holds(const LandscapeSample& s, double slack) {
  const double n = static_cast<double>(s.divergences.size());
  if (n == 0.0) return true;
  return s.total / (2.0 * n) <= s.op_distance + slack;
}

std::vector<LandscapeBin> bin_landscape(const std::vector<LandscapeSample>& samples, double width) {
  if (!(width > 0.0)) throw Error("bin width must be positive");
  const auto count = static_cast<std::size_t>(std::ceil(2.0 / width));
  std::vector<LandscapeBin> bins(count);
  for (std::size_t b = 0; b < count; ++b) {
    bins[b].lo = static_cast<double>(b) * width;
    bins[b].hi = static_cast<double>(b + 1) * width;
  }
  for (const LandscapeSample& s : samples) {
    auto b = static_cast<std::size_t>(s.op_distance / width);
    b = std::min(b, count - 1);
    LandscapeBin& bin = bins[b];
    if (bin.mean_divergences.empty()) bin.mean_divergences.assign(s.divergences.size(), 0.0);
    ++bin.count;
    for (std::size_t n = 0; n < s.divergences.size(); ++n) bin.mean_divergences[n] += s.divergences[n];
    bin.mean_total += s.total;
  }
  std::vector<LandscapeBin> out;
  for (LandscapeBin& bin : bins) {
    if (bin.count == 0) continue;
    const double c = static_cast<double>(bin.count);
    for (double& v : bin.mean_divergences) v /= c;
    bin.mean_total /= c;
    out.push_back(std::move(bin));
  }
  return out;
}

std::string landscape_csv(const std::vector<LandscapeSample>& samples) {
  const std::size_t n = samples.empty() ? 0 : samples.front().divergences.size();
  std::string out = "step,op_distance";
  for (std::size_t i = 1; i <= n; ++i) out += ",delta_" + std::to_string(i);
  out += ",delta_total\n";
  for (std::size_t k = 0; k < samples.size(); ++k) {
    out += std::to_string(k + 1) + "," + format_double(samples[k].op_distance);
    for (double d : samples[k].divergences) out += "," + format_double(d);
    out += "," + format_double(samples[k].total) + "\n";
  }
  return out;
}

std::string landscape_bins_csv(const std::vector<LandscapeBin>& bins) {
  const std::size_t n = bins.empty() ? 0 : bins.front().mean_divergences.size();
  std::string out = "lo,hi,count";
  for (std::size_t i = 1; i <= n; ++i) out += ",mean_delta_" + std::to_string(i);
  out += ",mean_delta_total\n";
  for (const LandscapeBin& b : bins) {
    out += format_double(b.lo) + "," + format_double(b.hi) + "," + std::to_string(b.count);
    for (double d : b.mean_divergences) out += "," + format_double(d);
    out += "," + format_double(b.mean_total) + "\n";
  }
  return out;
}

RealMatrix amplitude_damping_hankel_reference() {
  RealMatrix h(7, 7);
  h << 1, 0.75, 0.25, 0.75, 0, 0.125, 0.125,          //
      0.75, 0.75, 0, 0.75, 0, 0, 0,                    //
      0.25, 0.125, 0.125, 0.125, 0, 0.0625, 0.0625,    //
      0.75, 0.75, 0, 0.75, 0, 0, 0,                    //
      0, 0, 0, 0, 0, 0, 0,                             //
      0.125, 0.125, 0, 0.125, 0, 0, 0,                 //
      0.125, 0.0625, 0.0625, 0.0625, 0, 0.03125, 0.03125;
  return h;
}

AnsatzSpec market_ansatz_spec() {
  AnsatzSpec s;
  s.kind = AnsatzTemplate::RealAmplitudes;
  s.state_qubits = 1;
  s.emission_qubits = 1;
  s.reps = 1;
  s.entanglement = Entanglement::Linear;
  return s;
}

AnsatzSpec monras_ansatz_spec() {
  AnsatzSpec s;
  s.kind = AnsatzTemplate::EfficientSU2;
  s.state_qubits = 1;
  s.emission_qubits = 2;
  s.reps = 3;
  s.entanglement = Entanglement::Full;
  s.rotations = RotationPair::RZ_RX;
  return s;
}

Problem market_problem(std::size_t n) {
  Problem p;
  p.target = distributions_upto(fixtures::market(), n);
  p.state_qubits = 1;
  p.emission_qubits = 1;
  p.gate_set = {GateType::X, GateType::Y, GateType::RX, GateType::RY};
  p.rho0_kind = Rho0Kind::MaximallyMixed;
  return p;
}

Problem gaussian_problem(std::size_t n) {
  Problem p;
  p.target = distributions_upto(fixtures::gaussian4(), n);
  p.state_qubits = 1;
  p.emission_qubits = 2;
  p.gate_set = {GateType::X, GateType::Y, GateType::RX, GateType::RY, GateType::P};
  p.rho0_kind = Rho0Kind::MaximallyMixed;
  return p;
}

std::pair<Problem, Hypothesis> planted_problem(std::uint64_t seed, std::size_t gates, std::size_t n) {
  Problem p = market_problem(1);
  Hypothesis h;
  h.state_qubits = p.state_qubits;
  h.emission_qubits = p.emission_qubits;
  h.rho0_kind = p.rho0_kind;
  GateSampler sampler;
  sampler.gate_set = p.gate_set;
  Rng rng = stream(seed, {0xC0FFEE});
  std::vector<DistributionTable> uniform;
  for (std::size_t t = 1; t <= n; ++t)
    uniform.emplace_back(2, t, std::vector<double>(std::size_t{1} << t, 1.0 / static_cast<double>(std::size_t{1} << t)));
  // Redraw targets that are close to fair coin flips; any circuit can match those.
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<GateSpec> g;
    for (std::size_t i = 0; i < gates; ++i) g.push_back(random_gate(sampler, p.n_qubits(), rng));
    h.circuit = Circuit(p.n_qubits(), std::move(g));
    p.target = hypothesis_distributions(h, 2, n);
    if (divergence_avg(p.target, uniform) > 0.05) break;
  }
  return {p, h};
}

Hypothesis learned_market_model(std::uint64_t seed, int threads) {
  const AnsatzSpec spec = market_ansatz_spec();
  const auto target = distributions_upto(fixtures::market(), kMarketAnsatzLengths);
  const auto runs = train_ansatz_restarts(spec, target, "nm", 10, 20000, seed, threads);
  return ansatz_hypothesis(spec, runs.front().params);
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"table2", "monras_ansatz", "market_ansatz",
                                              "market_evo", "gaussian_evo"};
  return names;
}

ExperimentReport reproduce(const std::string& name, const ExperimentOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  if (name == "table2") {
    rep = run_table2();
  } else if (name == "monras_ansatz") {
    const auto target = distributions_upto(models::monras(), kMonrasAnsatzLengths);
    rep = run_ansatz(monras_ansatz_spec(), target, 1e-3, opts);
  } else if (name == "market_ansatz") {
    const auto target = distributions_upto(fixtures::market(), kMarketAnsatzLengths);
    rep = run_ansatz(market_ansatz_spec(), target, 1e-2, opts);
  } else if (name == "market_evo") {
    rep = run_evo(market_problem(5), 0.01, opts, 5);
  } else if (name == "gaussian_evo") {
    rep = run_evo(gaussian_problem(3), 0.01, opts, 3);
  } else {
    throw Error("unknown experiment '" + name + "'");
  }
  rep.name = name;
  rep.summary = Json{{"experiment", name}, {"passed", rep.passed}, {"details", rep.summary}};
  rep.seconds = seconds_since(start);
  return rep;
}

}  // namespace qhmm
