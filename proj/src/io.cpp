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

#include "qhmm/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

namespace qhmm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.compare(0, prefix.size(), prefix) == 0;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

DensityOperator density_from_json(const Json& j) { return DensityOperator::from_matrix(matrix_from_json(j)); }

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::string sequence_cell(const SymbolSequence& s) { return s.empty() ? "e" : format_sequence(s); }

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const ComplexMatrix& m) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      re.push_back(m(i, k).real());
      im.push_back(m(i, k).imag());
    }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  if (rows < 0 || cols < 0) throw DimensionError("matrix dimensions must be nonnegative");
  const auto re = j.at("re").get<std::vector<double>>();
  const std::vector<double> im =
      j.contains("im") ? j.at("im").get<std::vector<double>>() : std::vector<double>(re.size(), 0.0);
  const auto n = static_cast<std::size_t>(rows * cols);
  if (re.size() != n || im.size() != n) throw DimensionError("matrix entry count does not match shape");
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) {
      const auto idx = static_cast<std::size_t>(i * cols + k);
      m(i, k) = Complex(re[idx], im[idx]);
    }
  return m;
}

Json to_json(const KrausChannel& ch) {
  Json groups = Json::object();
  for (std::size_t a = 0; a < ch.num_symbols(); ++a) {
    Json ops = Json::array();
    for (const ComplexMatrix& k : ch.group(a)) ops.push_back(to_json(k));
    groups[ch.symbols()[a]] = ops;
  }
  return Json{{"dim", ch.dim()}, {"groups", groups}};
}

KrausChannel channel_from_json(const Json& j) {
  const auto dim = j.at("dim").get<std::size_t>();
  std::vector<std::string> symbols;
  std::vector<std::vector<ComplexMatrix>> groups;
  for (const auto& [symbol, ops] : j.at("groups").items()) {
    symbols.push_back(symbol);
    std::vector<ComplexMatrix> g;
    for (const Json& op : ops) g.push_back(matrix_from_json(op));
    groups.push_back(std::move(g));
  }
  return KrausChannel(dim, std::move(symbols), std::move(groups));
}

Json to_json(const ClassicalHmm& h) {
  const RealMatrix& a = h.transition();
  const RealMatrix& b = h.emission();
  Json rows_a = Json::array(), rows_b = Json::array(), x0 = Json::array();
  for (Eigen::Index from = 0; from < a.cols(); ++from) {
    Json row = Json::array();
    for (Eigen::Index to = 0; to < a.rows(); ++to) row.push_back(a(to, from));
    rows_a.push_back(row);
    Json em = Json::array();
    for (Eigen::Index s = 0; s < b.rows(); ++s) em.push_back(b(s, from));
    rows_b.push_back(em);
    x0.push_back(h.initial()(from));
  }
  return Json{{"alphabet", h.alphabet()}, {"A", rows_a}, {"B", rows_b}, {"x0", x0}};
}

ClassicalHmm classical_from_json(const Json& j) {
  std::optional<RealVector> x0;
  if (j.contains("x0")) {
    const auto v = j.at("x0").get<std::vector<double>>();
    x0 = Eigen::Map<const RealVector>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  return ClassicalHmm::from_rows(j.at("alphabet").get<std::vector<std::string>>(),
                                 j.at("A").get<std::vector<std::vector<double>>>(),
                                 j.at("B").get<std::vector<std::vector<double>>>(), x0);
}

Json to_json(const Circuit& c) {
  Json gates = Json::array();
  for (const GateSpec& g : c.gates()) {
    Json q = Json::array();
    if (g.control >= 0) q.push_back(g.control);
    q.push_back(g.target);
    Json p = Json::array();
    if (param_count(g.type) > 0) p.push_back(c.angle(g));
    gates.push_back(Json{{"t", gate_name(g.type)}, {"q", q}, {"p", p}});
  }
  return Json{{"n_qubits", c.n_qubits()}, {"gates", gates}};
}

Circuit circuit_from_json(const Json& j) {
  const auto n = j.at("n_qubits").get<std::size_t>();
  std::vector<GateSpec> gates;
  for (const Json& g : j.at("gates")) {
    GateSpec spec;
    spec.type = parse_gate(g.at("t").get<std::string>());
    const auto q = g.at("q").get<std::vector<int>>();
    if (q.size() == 1) {
      spec.target = q[0];
    } else if (q.size() == 2) {
      spec.control = q[0];
      spec.target = q[1];
    } else {
      throw Error("gate qubit list must have one or two entries");
    }
    const auto p = g.contains("p") ? g.at("p").get<std::vector<double>>() : std::vector<double>{};
    if (p.size() != param_count(spec.type))
      throw Error("gate " + gate_name(spec.type) + " expects " +
                  std::to_string(param_count(spec.type)) + " parameter(s)");
    if (!p.empty()) spec.angle = p[0];
    gates.push_back(spec);
  }
  return Circuit(n, std::move(gates));
}

Json to_json(const QhmmKraus& q) {
  return Json{{"kind", "kraus"}, {"channel", to_json(q.channel())}, {"rho0", to_json(q.rho0().matrix())}};
}

Json to_json(const QhmmUnitary& q) {
  return Json{{"kind", "unitary"},
              {"alphabet", q.alphabet()},
              {"dim_s", q.dim_s()},
              {"dim_e", q.dim_e()},
              {"unitary", to_json(q.unitary().matrix())},
              {"symbol_map", q.symbol_map()},
              {"rho0", to_json(q.rho0().matrix())},
              {"e0", q.e0()},
              {"reset", q.reset_mode() == ResetMode::Reset ? "reset" : "carry"},
              {"measured", q.measured() == MeasuredRegister::Emission ? "emission" : "state"}};
}

Json to_json(const Hypothesis& h, std::size_t alphabet_size) {
  Json j{{"kind", "circuit"},
         {"alphabet_size", alphabet_size},
         {"state_qubits", h.state_qubits},
         {"emission_qubits", h.emission_qubits},
         {"symbol_map", h.symbol_map},
         {"rho0", rho0_kind_name(h.rho0_kind)},
         {"circuit", to_json(h.circuit)}};
  if (h.fitness) j["fitness"] = *h.fitness;
  if (h.divergence) j["divergence"] = *h.divergence;
  return j;
}

LoadedModel model_from_json(const Json& j) {
  std::string kind = get_or<std::string>(j, "kind", "");
  if (kind.empty()) {
    if (j.contains("A")) kind = "classical";
    else if (j.contains("unitary")) kind = "unitary";
    else if (j.contains("circuit")) kind = "circuit";
    else if (j.contains("channel")) kind = "kraus";
    else throw Error("cannot tell which model form this JSON holds");
  }
  LoadedModel m;
  m.kind = kind;
  if (kind == "classical") {
    m.classical = classical_from_json(j);
  } else if (kind == "kraus") {
    m.kraus = QhmmKraus(channel_from_json(j.at("channel")), density_from_json(j.at("rho0")));
  } else if (kind == "unitary") {
    const std::string reset = get_or<std::string>(j, "reset", "reset");
    const std::string measured = get_or<std::string>(j, "measured", "emission");
    if (reset != "reset" && reset != "carry") throw Error("reset must be 'reset' or 'carry'");
    if (measured != "emission" && measured != "state")
      throw Error("measured must be 'emission' or 'state'");
    m.unitary = QhmmUnitary(j.at("alphabet").get<std::vector<std::string>>(),
                            j.at("dim_s").get<std::size_t>(), j.at("dim_e").get<std::size_t>(),
                            UnitaryOperator::from_matrix(matrix_from_json(j.at("unitary"))),
                            j.at("symbol_map").get<std::vector<int>>(),
                            density_from_json(j.at("rho0")), get_or<std::size_t>(j, "e0", 0),
                            reset == "reset" ? ResetMode::Reset : ResetMode::Carry,
                            measured == "emission" ? MeasuredRegister::Emission
                                                   : MeasuredRegister::State);
  } else if (kind == "circuit") {
    Hypothesis h;
    h.state_qubits = j.at("state_qubits").get<std::size_t>();
    h.emission_qubits = j.at("emission_qubits").get<std::size_t>();
    h.symbol_map = get_or<std::vector<int>>(j, "symbol_map", {});
    h.rho0_kind = parse_rho0_kind(get_or<std::string>(j, "rho0", "maximally_mixed"));
    h.circuit = circuit_from_json(j.at("circuit"));
    if (h.circuit.n_qubits() != h.state_qubits + h.emission_qubits)
      throw DimensionError("circuit width must equal state plus emission qubits");
    m.alphabet_size = get_or<std::size_t>(j, "alphabet_size", h.dim_e());
    m.hypothesis = std::move(h);
  } else {
    throw Error("unknown model kind '" + kind + "'");
  }
  return m;
}

const std::vector<std::string>& builtin_models() {
  static const std::vector<std::string> names{"builtin:market", "builtin:gaussian4",
                                              "builtin:amplitude_damping", "builtin:monras"};
  return names;
}

LoadedModel load_model(const std::string& spec) {
  LoadedModel m;
  if (spec == "builtin:market") {
    m.kind = "classical";
    m.classical = fixtures::market();
  } else if (spec == "builtin:gaussian4") {
    m.kind = "classical";
    m.classical = fixtures::gaussian4();
  } else if (spec == "builtin:amplitude_damping") {
    m.kind = "unitary";
    m.unitary = models::amplitude_damping(std::acos(-1.0) / 2.0);
  } else if (spec == "builtin:monras") {
    m.kind = "kraus";
    m.kraus = models::monras();
  } else if (starts_with(spec, "builtin:")) {
    throw Error("unknown builtin model '" + spec + "'");
  } else {
    Json j;
    try {
      j = Json::parse(read_text(spec));
    } catch (const Json::parse_error& e) {
      throw Error("'" + spec + "' is not valid JSON: " + e.what());
    }
    return model_from_json(j);
  }
  return m;
}

QhmmKraus as_kraus(const LoadedModel& m) {
  if (m.kraus) return *m.kraus;
  if (m.unitary) return to_kraus(*m.unitary);
  if (m.classical) return quantize_classical(*m.classical);
  if (m.hypothesis) return to_kraus(to_model(*m.hypothesis, m.alphabet_size));
  throw Error("empty model");
}

QhmmUnitary as_unitary(const LoadedModel& m) {
  if (m.unitary) return *m.unitary;
  if (m.hypothesis) return to_model(*m.hypothesis, m.alphabet_size);
  const QhmmKraus k = as_kraus(m);
  return from_kraus(k, k.channel().total_operators());
}

std::vector<DistributionTable> model_distributions(const LoadedModel& m, std::size_t n) {
  if (m.classical) return distributions_upto(*m.classical, n);
  if (m.hypothesis) return hypothesis_distributions(*m.hypothesis, m.alphabet_size, n);
  return distributions_upto(as_kraus(m), n);
}

std::string table_to_csv(const DistributionTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.size(); ++i)
    out += sequence_cell(table.sequence_at(i)) + "," + format_double(table[i]) + "\n";
  return out;
}

std::string tables_to_csv(const std::vector<DistributionTable>& tables) {
  std::string out = "sequence,probability\n";
  for (const DistributionTable& t : tables) {
    if (t.length() == 0) {
      out += "e," + format_double(t[0]) + "\n";
      continue;
    }
    out += table_to_csv(t);
  }
  return out;
}

std::vector<DistributionTable> tables_from_csv(const std::string& text, std::size_t alphabet_size) {
  std::map<std::size_t, std::vector<std::pair<SymbolSequence, double>>> by_len;
  int max_symbol = -1;
  for (const std::string& line : lines_of(text)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error("distribution line lacks a comma: '" + line + "'");
    const std::string seq = trim(line.substr(0, comma));
    const std::string val = trim(line.substr(comma + 1));
    if (seq == "sequence") continue;
    if (seq.empty() || seq == "e") continue;
    double p = 0.0;
    try {
      std::size_t used = 0;
      p = std::stod(val, &used);
      if (used != val.size()) throw Error("");
    } catch (...) {
      throw Error("bad probability '" + val + "'");
    }
    if (!(p >= 0.0) || p > 1.0 + 1e-9) throw Error("probability out of range: '" + val + "'");
    SymbolSequence s = parse_sequence(seq);
    for (int a : s) max_symbol = std::max(max_symbol, a);
    by_len[s.size()].emplace_back(std::move(s), p);
  }
  if (by_len.empty()) throw Error("distribution file has no entries");
  const std::size_t m = alphabet_size > 0 ? alphabet_size : static_cast<std::size_t>(max_symbol + 1);
  if (max_symbol >= static_cast<int>(m)) throw Error("symbol exceeds the alphabet size");
  std::vector<DistributionTable> out;
  std::size_t expect = 1;
  for (auto& [len, entries] : by_len) {
    if (len != expect) throw Error("distribution lengths must run contiguously from 1");
    ++expect;
    DistributionTable t(m, len);
    for (const auto& [s, p] : entries) t.set(s, p);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<SymbolSequence> corpus_from_text(const std::string& text) {
  std::vector<SymbolSequence> out;
  for (const std::string& line : lines_of(text)) out.push_back(parse_sequence(line));
  return out;
}

std::string corpus_to_text(const std::vector<SymbolSequence>& corpus) {
  std::string out;
  for (const SymbolSequence& s : corpus) out += format_sequence(s) + "\n";
  return out;
}

std::vector<DistributionTable> load_target(const std::string& spec, std::size_t n,
                                           std::size_t alphabet_size) {
  if (starts_with(spec, "builtin:") || ends_with(spec, ".json"))
    return model_distributions(load_model(spec), n);
  const std::string text = read_text(spec);
  const std::vector<std::string> lines = lines_of(text);
  if (!lines.empty() && lines.front().find(',') != std::string::npos) {
    std::vector<DistributionTable> tables = tables_from_csv(text, alphabet_size);
    if (tables.size() > n)
      tables.erase(tables.begin() + static_cast<std::ptrdiff_t>(n), tables.end());
    return tables;
  }
  const std::vector<SymbolSequence> corpus = corpus_from_text(text);
  std::size_t m = alphabet_size;
  if (m == 0)
    for (const SymbolSequence& s : corpus)
      for (int a : s) m = std::max(m, static_cast<std::size_t>(a) + 1);
  std::vector<DistributionTable> tables;
  for (std::size_t t = 1; t <= n; ++t) {
    const std::vector<SymbolSequence> windows = subsequence_sample(corpus, t);
    if (windows.empty()) break;
    tables.push_back(empirical_estimate(windows, m, t));
  }
  if (tables.empty()) throw Error("corpus '" + spec + "' has no usable sequences");
  return tables;
}

void apply_learning_config(const Json& j, Problem& p, HyperParams& hp) {
  if (!j.is_object()) throw Error("learning config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "mu") hp.mu = v.get<std::size_t>();
    else if (key == "lambda") hp.lambda = v.get<std::size_t>();
    else if (key == "gamma") hp.gamma_bandit = v.get<double>();
    else if (key == "prog_window") hp.prog_window = v.get<std::size_t>();
    else if (key == "g_max") hp.g_max = v.get<std::size_t>();
    else if (key == "n_max") hp.n_max = v.get<std::size_t>();
    else if (key == "target_fitness") hp.target_fitness = v.get<double>();
    else if (key == "target_divergence") hp.target_divergence = v.get<double>();
    else if (key == "seed") hp.seed = v.get<std::uint64_t>();
    else if (key == "threads") hp.threads = v.get<int>();
    else if (key == "max_search_len") hp.max_search_len = v.get<std::size_t>();
    else if (key == "optimizers") hp.optimizers = v.get<std::vector<std::string>>();
    else if (key == "c_q") p.weights.c_q = v.get<double>();
    else if (key == "c_e") p.weights.c_e = v.get<double>();
    else if (key == "min_gates") p.min_gates = v.get<std::size_t>();
    else if (key == "max_gates") p.max_gates = v.get<std::size_t>();
    else if (key == "optimizer_budget") p.optimizer_budget = v.get<std::size_t>();
    else if (key == "state_qubits") p.state_qubits = v.get<std::size_t>();
    else if (key == "emission_qubits") p.emission_qubits = v.get<std::size_t>();
    else if (key == "symbol_map") p.symbol_map = v.get<std::vector<int>>();
    else if (key == "rho0") p.rho0_kind = parse_rho0_kind(v.get<std::string>());
    else if (key == "gate_set") {
      p.gate_set.clear();
      for (const std::string& g : v.get<std::vector<std::string>>()) p.gate_set.push_back(parse_gate(g));
    } else {
      throw Error("unknown learning config key '" + key + "'");
    }
  }
  for (const std::string& label : hp.optimizers) lookup_optimizer(label);
}

Json learning_config_json(const Problem& p, const HyperParams& hp) {
  Json gates = Json::array();
  for (GateType g : p.gate_set) gates.push_back(gate_name(g));
  Json j{{"mu", hp.mu},
         {"lambda", hp.lambda},
         {"gate_set", gates},
         {"min_gates", p.min_gates},
         {"max_gates", p.max_gates},
         {"c_q", p.weights.c_q},
         {"c_e", p.weights.c_e},
         {"gamma", hp.gamma_bandit},
         {"prog_window", hp.prog_window},
         {"g_max", hp.g_max},
         {"n_max", hp.n_max},
         {"target_fitness", hp.target_fitness},
         {"seed", hp.seed},
         {"optimizers", hp.optimizers},
         {"optimizer_budget", p.optimizer_budget},
         {"max_search_len", hp.max_search_len},
         {"state_qubits", p.state_qubits},
         {"emission_qubits", p.emission_qubits},
         {"rho0", rho0_kind_name(p.rho0_kind)}};
  if (hp.target_divergence) j["target_divergence"] = *hp.target_divergence;
  if (!p.symbol_map.empty()) j["symbol_map"] = p.symbol_map;
  return j;
}

Json to_json(const LearningReport& r, std::size_t alphabet_size) {
  Json gens = Json::array();
  for (const GenerationStats& g : r.generations)
    gens.push_back(Json{{"generation", g.generation},
                        {"best_fitness", g.best_fitness},
                        {"mean_fitness", g.mean_fitness},
                        {"best_divergence", g.best_divergence},
                        {"temperature", g.temperature},
                        {"accepted_inferior", g.accepted_inferior},
                        {"improved_children", g.improved_children}});
  Json bandits = Json::object();
  for (std::size_t d = 0; d < r.bandit_names.size(); ++d)
    bandits[r.bandit_names[d]] = Json{{"domain", r.bandit_domains.at(d)}, {"trace", r.bandit_traces.at(d)}};
  return Json{{"reached_target", r.reached_target},
              {"generations", gens},
              {"bandits", bandits},
              {"best", to_json(r.best, alphabet_size)}};
}

std::string fitness_trace_csv(const LearningReport& r) {
  std::string out =
      "generation,best_fitness,mean_fitness,best_divergence,temperature,accepted_inferior,"
      "improved_children\n";
  for (const GenerationStats& g : r.generations)
    out += std::to_string(g.generation) + "," + format_double(g.best_fitness) + "," +
           format_double(g.mean_fitness) + "," + format_double(g.best_divergence) + "," +
           format_double(g.temperature) + "," + std::to_string(g.accepted_inferior) + "," +
           std::to_string(g.improved_children) + "\n";
  return out;
}

std::string hankel_to_csv(const HankelMatrix& h) {
  std::string out = "prefix,suffix,value\n";
  for (std::size_t i = 0; i < h.prefixes.size(); ++i)
    for (std::size_t k = 0; k < h.suffixes.size(); ++k)
      out += sequence_cell(h.prefixes[i]) + "," + sequence_cell(h.suffixes[k]) + "," +
             format_double(h.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k))) + "\n";
  return out;
}

}  // namespace qhmm
