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

// qhmm: command-line driver for simulation, analysis and learning.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qhmm/experiments.hpp"
#include "qhmm/io.hpp"
#include "qhmm/learning.hpp"
#include "qhmm/model.hpp"
#include "qhmm/version.hpp"

namespace fs = std::filesystem;
using namespace qhmm;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out = ".";
  std::string config;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
};

std::uint64_t resolve_seed(const Globals& g) {
  if (g.seed_opt->count() > 0) return g.seed;
  const std::uint64_t s = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}();
  std::cerr << "qhmm: no --seed given, using " << s << "\n";
  return s;
}

fs::path out_file(const Globals& g, const std::string& name) {
  fs::create_directories(g.out);
  return fs::path(g.out) / name;
}

void emit(const Globals& g, const std::string& name, const std::string& text) {
  const fs::path p = out_file(g, name);
  write_text(p.string(), text);
  std::cerr << "wrote " << p.string() << "\n";
}

Json config_json(const Globals& g) {
  if (g.config.empty()) return Json::object();
  try {
    return Json::parse(read_text(g.config));
  } catch (const Json::parse_error& e) {
    throw Error("config '" + g.config + "' is not valid JSON: " + e.what());
  }
}

std::string sequence_cell(const SymbolSequence& s) { return s.empty() ? "e" : format_sequence(s); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum hidden Markov model toolkit", "qhmm"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Globals g;
  g.seed_opt = app.add_option("--seed", g.seed, "Random seed (generated and logged if omitted)");
  g.threads_opt = app.add_option("--threads", g.threads, "Worker threads; 0 uses the OpenMP default");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--config", g.config, "JSON config file; flags override its values");

  // simulate
  std::string model;
  std::size_t t = 2, shots = 1000;
  auto* sim = app.add_subcommand("simulate", "Sample sequences by trajectory simulation");
  sim->add_option("--model", model, "Model JSON file or builtin:<name>")->required();
  sim->add_option("-t,--t", t, "Sequence length")->capture_default_str();
  sim->add_option("--shots", shots, "Number of sequences")->capture_default_str()->check(CLI::PositiveNumber);

  // distribution
  auto* dist = app.add_subcommand("distribution", "Exact distribution of length-t sequences");
  dist->add_option("--model", model, "Model JSON file or builtin:<name>")->required();
  dist->add_option("-t,--t", t, "Sequence length")->capture_default_str();

  // hankel
  std::string target;
  std::size_t max_prefix = 2, max_suffix = 2;
  double tol = tol::kRank;
  auto* hank = app.add_subcommand("hankel", "Hankel matrix and rank report");
  auto* hank_model = hank->add_option("--model", model, "Model JSON file or builtin:<name>");
  auto* hank_target = hank->add_option("--target", target, "Distribution CSV or corpus file");
  hank_model->excludes(hank_target);
  hank->add_option("--max-prefix", max_prefix, "Longest prefix")->capture_default_str();
  hank->add_option("--max-suffix", max_suffix, "Longest suffix")->capture_default_str();
  hank->add_option("--tol", tol, "Relative singular-value tolerance")->capture_default_str();

  // quantize
  auto* quant = app.add_subcommand("quantize", "Quantize a classical HMM into Kraus form");
  quant->add_option("--model", model, "Classical model JSON or builtin:market|builtin:gaussian4")->required();

  // learn-evo
  std::size_t n_max = 5;
  auto* evo = app.add_subcommand("learn-evo", "Evolutionary QHMM learning");
  evo->add_option("--target", target, "Target: distribution CSV, corpus, or model")->required();
  auto* evo_n = evo->add_option("-n,--n-max", n_max, "Longest target length in the fitness");

  // learn-ansatz
  std::string templ = "real_amplitudes", entanglement = "linear", optimizer = "nm", rotations = "rz_rx";
  std::size_t reps = 1, restarts = 10, budget = 20000, state_qubits = 1, emission_qubits = 1, lengths = 3;
  auto* ans = app.add_subcommand("learn-ansatz", "Train a fixed circuit ansatz");
  ans->add_option("--target", target, "Target: distribution CSV, corpus, or model")->required();
  ans->add_option("--template", templ, "real_amplitudes or efficient_su2")->capture_default_str();
  ans->add_option("--entanglement", entanglement, "full or linear")->capture_default_str();
  ans->add_option("--rotations", rotations, "efficient_su2 rotation pair: ry_rz or rz_rx")->capture_default_str();
  ans->add_option("--reps", reps, "Repetitions")->capture_default_str();
  ans->add_option("--optimizer", optimizer, "tnc, cbla, bfsg, gc, slsqp or nm")->capture_default_str();
  ans->add_option("--restarts", restarts, "Independent restarts")->capture_default_str()->check(CLI::PositiveNumber);
  ans->add_option("--budget", budget, "Evaluations per restart")->capture_default_str();
  ans->add_option("--state-qubits", state_qubits, "State register width")->capture_default_str();
  ans->add_option("--emission-qubits", emission_qubits, "Emission register width")->capture_default_str();
  ans->add_option("-n,--lengths", lengths, "Target lengths 1..n in the cost")->capture_default_str();

  // landscape
  std::size_t steps = 2000;
  std::vector<double> rates{0.1};
  auto* land = app.add_subcommand("landscape", "Fitness landscape walk around a model");
  land->add_option("--model", model, "Circuit hypothesis JSON, or builtin:market for the learned market model")
      ->required();
  land->add_option("--steps", steps, "Walk length")->capture_default_str();
  land->add_option("--rates", rates, "Relative mutation standard deviations")->delimiter(',')->capture_default_str();
  land->add_option("-n,--n-max", n_max, "Longest sequence length")->capture_default_str();
  double window = kLandscapeWindow;
  land->add_option("--max-distance", window, "Correlate only samples with operator distance up to this")
      ->capture_default_str();

  // reproduce
  std::string name;
  ExperimentOptions eopts;
  auto* repro = app.add_subcommand("reproduce", "Run a scripted reproduction");
  repro->add_option("name", name, "table2, monras_ansatz, market_ansatz, market_evo, gaussian_evo")
      ->required()
      ->check(CLI::IsMember(experiment_names()));
  repro->add_option("--restarts", eopts.restarts, "Ansatz restarts")->capture_default_str();
  repro->add_option("--mu", eopts.mu, "Evolution population size")->capture_default_str();
  repro->add_option("--g-max", eopts.g_max, "Evolution generation limit")->capture_default_str();
  repro->add_option("--evo-seeds", eopts.evo_seeds, "Evolution seeds to try")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (sim->parsed()) {
      const QhmmUnitary q = as_unitary(load_model(model));
      const auto seqs = simulate(q, t, shots, resolve_seed(g), g.threads);
      std::string csv = "sequence\n";
      for (const SymbolSequence& s : seqs) csv += sequence_cell(s) + "\n";
      emit(g, "sequences.csv", csv);
      emit(g, "empirical.csv",
           "sequence,probability\n" + table_to_csv(empirical_estimate(seqs, q.num_symbols(), t)));
    } else if (dist->parsed()) {
      const LoadedModel m = load_model(model);
      if (t == 0) {
        emit(g, "distribution.csv", "sequence,probability\ne,1\n");
      } else {
        emit(g, "distribution.csv", "sequence,probability\n" + table_to_csv(model_distributions(m, t).back()));
      }
    } else if (hank->parsed()) {
      const std::size_t need = max_prefix + max_suffix;
      std::vector<DistributionTable> tables;
      if (!model.empty()) tables = model_distributions(load_model(model), need);
      else if (!target.empty()) tables = load_target(target, need);
      else throw Error("hankel needs --model or --target");
      if (tables.size() < need)
        throw Error("target covers lengths up to " + std::to_string(tables.size()) + " but " +
                    std::to_string(need) + " are needed");
      const HankelMatrix h = hankel(table_function(tables), tables.front().alphabet_size(), max_prefix, max_suffix);
      const OrderEstimate est = order_estimate(h, tol);
      emit(g, "hankel.csv", hankel_to_csv(h));
      emit(g, "rank.json", dump(Json{{"rows", h.prefixes.size()},
                                     {"cols", h.suffixes.size()},
                                     {"tol", tol},
                                     {"rank", est.rank},
                                     {"classical_order", est.classical_order},
                                     {"quantum_dim", est.quantum_dim}}));
    } else if (quant->parsed()) {
      const LoadedModel m = load_model(model);
      if (!m.classical) throw Error("quantize expects a classical model");
      emit(g, "qhmm.json", dump(to_json(quantize_classical(*m.classical))));
    } else if (evo->parsed()) {
      Problem p;
      HyperParams hp;
      apply_learning_config(config_json(g), p, hp);
      if (evo_n->count() > 0) hp.n_max = n_max;
      if (g.seed_opt->count() > 0 || !config_json(g).contains("seed")) hp.seed = resolve_seed(g);
      if (g.threads_opt->count() > 0) hp.threads = g.threads;
      p.target = load_target(target, hp.n_max);
      const LearningReport r = evolve(p, hp);
      std::cerr << "learn-evo: " << r.generations.back().generation << " generations, best fitness "
                << *r.best.fitness << ", divergence " << r.best.divergence.value_or(0.0) << ", "
                << r.wall_seconds << " s\n";
      emit(g, "report.json", dump(Json{{"config", learning_config_json(p, hp)},
                                       {"report", to_json(r, p.alphabet_size())}}));
      emit(g, "best_model.json", dump(to_json(r.best, p.alphabet_size())));
      emit(g, "fitness_trace.csv", fitness_trace_csv(r));
    } else if (ans->parsed()) {
      AnsatzSpec spec;
      spec.kind = parse_ansatz_template(templ);
      spec.entanglement = parse_entanglement(entanglement);
      if (rotations == "ry_rz") spec.rotations = RotationPair::RY_RZ;
      else if (rotations == "rz_rx") spec.rotations = RotationPair::RZ_RX;
      else throw Error("unknown rotation pair '" + rotations + "'");
      spec.reps = reps;
      spec.state_qubits = state_qubits;
      spec.emission_qubits = emission_qubits;
      const auto tables = load_target(target, lengths);
      const std::uint64_t seed = resolve_seed(g);
      const auto runs = train_ansatz_restarts(spec, tables, optimizer, restarts, budget, seed, g.threads);
      Json costs = Json::array();
      std::string curve = "restart,evaluation,best_cost\n";
      for (const AnsatzResult& r : runs) {
        costs.push_back(Json{{"restart", r.restart}, {"cost", r.cost}, {"evaluations", r.evaluations}});
        for (std::size_t i = 0; i < r.trace.size(); ++i)
          curve += std::to_string(r.restart) + "," + std::to_string(i + 1) + "," + format_double(r.trace[i]) + "\n";
      }
      Hypothesis best;
      best.state_qubits = spec.state_qubits;
      best.emission_qubits = spec.emission_qubits;
      best.circuit = build_ansatz(spec).with_params(runs.front().params);
      std::cerr << "learn-ansatz: best cost " << runs.front().cost << "\n";
      emit(g, "params.json", dump(Json{{"template", ansatz_template_name(spec.kind)},
                                       {"reps", reps},
                                       {"entanglement", entanglement_name(spec.entanglement)},
                                       {"optimizer", optimizer},
                                       {"seed", seed},
                                       {"best_cost", runs.front().cost},
                                       {"best_params", runs.front().params},
                                       {"restarts", costs},
                                       {"model", to_json(best, tables.front().alphabet_size())}}));
      emit(g, "training_curve.csv", curve);
    } else if (land->parsed()) {
      const std::uint64_t seed = resolve_seed(g);
      Hypothesis opt;
      std::size_t m = 2;
      if (model == "builtin:market") {
        opt = learned_market_model(seed, g.threads);
      } else {
        const LoadedModel lm = load_model(model);
        if (!lm.hypothesis) throw Error("landscape needs a circuit hypothesis model");
        opt = *lm.hypothesis;
        m = lm.alphabet_size;
      }
      Json corr = Json::array();
      for (std::size_t k = 0; k < rates.size(); ++k) {
        Rng rng = stream(seed, {k});
        const auto samples = landscape_walk(opt, m, n_max, steps, rates[k], rng);
        bool bound = true;
        for (const LandscapeSample& s : samples) bound = bound && smoothness_bound_holds(s);
        std::size_t inside = 0;
        for (const LandscapeSample& s : samples) inside += s.op_distance <= window ? 1 : 0;
        const bool enough = samples.size() >= 30;
        const auto r = enough ? landscape_correlation(samples, window) : std::nullopt;
        const auto r_all = enough ? landscape_correlation(samples) : std::nullopt;
        corr.push_back(Json{{"rate", rates[k]},
                            {"samples", samples.size()},
                            {"max_distance", window},
                            {"samples_in_window", inside},
                            {"pearson_r", r ? Json(*r) : Json(nullptr)},
                            {"pearson_r_all", r_all ? Json(*r_all) : Json(nullptr)},
                            {"smoothness_bound_holds", bound}});
        const std::string tag = "rate" + std::to_string(k);
        emit(g, "landscape_" + tag + ".csv", landscape_csv(samples));
        emit(g, "landscape_" + tag + "_bins.csv", landscape_bins_csv(bin_landscape(samples)));
      }
      emit(g, "correlation.json", dump(Json{{"seed", seed}, {"n_max", n_max}, {"walks", corr}}));
    } else if (repro->parsed()) {
      eopts.seed = g.seed_opt->count() > 0 ? g.seed : 1;
      eopts.threads = g.threads;
      const ExperimentReport rep = reproduce(name, eopts);
      const std::string dir = (fs::path(g.out) / name).string();
      Globals sub = g;
      sub.out = dir;
      emit(sub, "summary.json", dump(rep.summary));
      for (const auto& [file, text] : rep.files) emit(sub, file, text);
      std::cerr << name << ": " << (rep.passed ? "PASS" : "FAIL") << " in " << rep.seconds << " s\n";
      std::cout << name << " " << (rep.passed ? "PASS" : "FAIL") << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "qhmm: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
