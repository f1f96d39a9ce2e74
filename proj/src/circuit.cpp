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

#include "qhmm/circuit.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <limits>

namespace qhmm {

namespace {

struct GateInfo {
  GateType type;
  const char* name;
  bool two_qubit;
  std::size_t params;
};

constexpr std::array<GateInfo, 11> kGates{{
    {GateType::X, "X", false, 0},
    {GateType::Y, "Y", false, 0},
    {GateType::Z, "Z", false, 0},
    {GateType::H, "H", false, 0},
    {GateType::P, "P", false, 1},
    {GateType::RX, "RX", false, 1},
    {GateType::RY, "RY", false, 1},
    {GateType::RZ, "RZ", false, 1},
    {GateType::CX, "CX", true, 0},
    {GateType::CRY, "CRY", true, 1},
    {GateType::CRZ, "CRZ", true, 1},
}};

const GateInfo& info(GateType t) { return kGates[static_cast<std::size_t>(t)]; }

}  // namespace

std::string gate_name(GateType t) { return info(t).name; }

GateType parse_gate(const std::string& name) {
  std::string upper;
  for (char c : name) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (const auto& g : kGates)
    if (upper == g.name) return g.type;
  throw Error("unknown gate '" + name + "'");
}

bool is_two_qubit(GateType t) { return info(t).two_qubit; }
std::size_t param_count(GateType t) { return info(t).params; }

ComplexMatrix gate_matrix(GateType t, double angle) {
  const Complex i(0.0, 1.0);
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  ComplexMatrix m(2, 2);
  switch (t) {
    case GateType::X:
    case GateType::CX:
      m << 0.0, 1.0, 1.0, 0.0;
      break;
    case GateType::Y:
      m << 0.0, -i, i, 0.0;
      break;
    case GateType::Z:
      m << 1.0, 0.0, 0.0, -1.0;
      break;
    case GateType::H: {
      const double r = 1.0 / std::sqrt(2.0);
      m << r, r, r, -r;
      break;
    }
    case GateType::P:
      m << 1.0, 0.0, 0.0, std::exp(i * angle);
      break;
    case GateType::RX:
      m << c, -i * s, -i * s, c;
      break;
    case GateType::RY:
    case GateType::CRY:
      m << c, -s, s, c;
      break;
    case GateType::RZ:
    case GateType::CRZ:
      m << std::exp(-i * angle / 2.0), 0.0, 0.0, std::exp(i * angle / 2.0);
      break;
  }
  return m;
}

GateSpec GateSpec::single(GateType type, int target, double angle) {
  if (is_two_qubit(type)) throw Error(gate_name(type) + " needs a control qubit");
  GateSpec g;
  g.type = type;
  g.target = target;
  g.angle = angle;
  return g;
}

GateSpec GateSpec::controlled(GateType type, int control, int target, double angle) {
  GateSpec g;
  g.type = type;
  g.control = control;
  g.target = target;
  g.angle = angle;
  return g;
}

bool GateSpec::operator==(const GateSpec& o) const {
  return type == o.type && control == o.control && target == o.target && angle == o.angle &&
         slot == o.slot;
}

Circuit::Circuit(std::size_t n_qubits, std::vector<GateSpec> gates, std::vector<double> parameters)
    : n_qubits_(n_qubits), gates_(std::move(gates)), parameters_(std::move(parameters)) {
  if (n_qubits_ == 0 || n_qubits_ > 12) throw DimensionError("circuit needs 1..12 qubits");
  const int n = static_cast<int>(n_qubits_);
  for (const auto& g : gates_) {
    if (g.target < 0 || g.target >= n) throw DimensionError("gate target qubit out of range");
    if (is_two_qubit(g.type) && g.control < 0)
      throw DimensionError(gate_name(g.type) + " needs a control qubit");
    if (g.control != -1) {
      if (g.control < 0 || g.control >= n) throw DimensionError("gate control qubit out of range");
      if (g.control == g.target) throw DimensionError("control and target must differ");
    }
    if (g.slot >= static_cast<int>(parameters_.size()))
      throw DimensionError("gate refers to a missing parameter slot");
    if (g.slot >= 0 && param_count(g.type) == 0)
      throw DimensionError(gate_name(g.type) + " takes no parameter");
  }
}

std::vector<double> Circuit::params() const {
  std::vector<double> out = parameters_;
  for (const auto& g : gates_)
    if (g.slot < 0 && param_count(g.type) > 0) out.push_back(g.angle);
  return out;
}

std::size_t Circuit::num_params() const {
  std::size_t n = parameters_.size();
  for (const auto& g : gates_)
    if (g.slot < 0 && param_count(g.type) > 0) ++n;
  return n;
}

Circuit Circuit::with_params(const std::vector<double>& values) const {
  if (values.size() != num_params()) throw DimensionError("with_params: wrong parameter count");
  Circuit out = *this;
  std::size_t k = 0;
  for (; k < out.parameters_.size(); ++k) out.parameters_[k] = values[k];
  for (auto& g : out.gates_)
    if (g.slot < 0 && param_count(g.type) > 0) g.angle = values[k++];
  return out;
}

Circuit Circuit::bind(std::vector<double> slot_values) const {
  if (slot_values.size() != parameters_.size()) throw DimensionError("bind: wrong slot count");
  Circuit out = *this;
  out.parameters_ = std::move(slot_values);
  return out;
}

bool Circuit::bound() const {
  for (const auto& g : gates_)
    if (g.slot >= 0 && std::isnan(parameters_[static_cast<std::size_t>(g.slot)])) return false;
  return true;
}

double Circuit::angle(const GateSpec& g) const {
  return g.slot >= 0 ? parameters_[static_cast<std::size_t>(g.slot)] : g.angle;
}

std::size_t Circuit::two_qubit_count() const {
  std::size_t n = 0;
  for (const auto& g : gates_) n += g.control >= 0 ? 1 : 0;
  return n;
}

Circuit Circuit::then(const Circuit& other) const {
  if (other.n_qubits_ != n_qubits_) throw DimensionError("then: qubit counts differ");
  std::vector<GateSpec> gates = gates_;
  std::vector<double> params = parameters_;
  const int offset = static_cast<int>(parameters_.size());
  for (GateSpec g : other.gates_) {
    if (g.slot >= 0) g.slot += offset;
    gates.push_back(g);
  }
  params.insert(params.end(), other.parameters_.begin(), other.parameters_.end());
  return Circuit(n_qubits_, std::move(gates), std::move(params));
}

void apply_gate(ComplexMatrix& state, std::size_t n_qubits, const GateSpec& g, double angle) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (static_cast<std::size_t>(state.rows()) != dim) throw DimensionError("apply_gate: row count");
  const ComplexMatrix m = gate_matrix(g.type, angle);
  const Complex m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
  const std::size_t tmask = std::size_t{1} << (n_qubits - 1 - static_cast<std::size_t>(g.target));
  const std::size_t cmask =
      g.control >= 0 ? std::size_t{1} << (n_qubits - 1 - static_cast<std::size_t>(g.control)) : 0;
  const Eigen::Index cols = state.cols();
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & tmask) != 0 || (i & cmask) != cmask) continue;
    const auto r0 = static_cast<Eigen::Index>(i);
    const auto r1 = static_cast<Eigen::Index>(i | tmask);
    for (Eigen::Index k = 0; k < cols; ++k) {
      const Complex a = state(r0, k);
      const Complex b = state(r1, k);
      state(r0, k) = m00 * a + m01 * b;
      state(r1, k) = m10 * a + m11 * b;
    }
  }
}

UnitaryOperator compile(const Circuit& c) {
  if (!c.bound()) throw Error("compile: circuit has unbound parameters");
  ComplexMatrix u = ComplexMatrix::Identity(c.dim(), c.dim());
  for (const auto& g : c.gates()) apply_gate(u, c.n_qubits(), g, c.angle(g));
  return UnitaryOperator::from_matrix(std::move(u));
}

namespace {

ComplexMatrix embed_single(const ComplexMatrix& g, std::size_t q, std::size_t n) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (std::size_t k = 0; k < n; ++k)
    out = tensor_product(out, k == q ? g : ComplexMatrix::Identity(2, 2));
  return out;
}

}  // namespace

ComplexMatrix compile_reference(const Circuit& c) {
  if (!c.bound()) throw Error("compile: circuit has unbound parameters");
  const std::size_t n = c.n_qubits();
  ComplexMatrix u = ComplexMatrix::Identity(c.dim(), c.dim());
  ComplexMatrix p0 = ComplexMatrix::Zero(2, 2), p1 = ComplexMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  for (const auto& g : c.gates()) {
    const ComplexMatrix m = gate_matrix(g.type, c.angle(g));
    ComplexMatrix full;
    if (g.control < 0) {
      full = embed_single(m, static_cast<std::size_t>(g.target), n);
    } else {
      // |0><0| (x) I + |1><1| (x) G, placed on the control and target wires.
      ComplexMatrix idle = ComplexMatrix::Identity(1, 1), active = ComplexMatrix::Identity(1, 1);
      for (std::size_t k = 0; k < n; ++k) {
        const bool is_c = static_cast<int>(k) == g.control;
        const bool is_t = static_cast<int>(k) == g.target;
        idle = tensor_product(idle, is_c ? p0 : ComplexMatrix::Identity(2, 2));
        active = tensor_product(active, is_c ? p1 : (is_t ? m : ComplexMatrix::Identity(2, 2)));
      }
      full = idle + active;
    }
    u = full * u;
  }
  return u;
}

std::string entanglement_name(Entanglement e) { return e == Entanglement::Full ? "full" : "linear"; }

Entanglement parse_entanglement(const std::string& name) {
  if (name == "full") return Entanglement::Full;
  if (name == "linear") return Entanglement::Linear;
  throw Error("unknown entanglement '" + name + "' (expected full or linear)");
}

namespace {

void entangle(std::vector<GateSpec>& gates, std::size_t n, Entanglement ent) {
  const int k = static_cast<int>(n);
  if (ent == Entanglement::Full) {
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) gates.push_back(GateSpec::controlled(GateType::CX, i, j));
  } else {
    for (int i = 0; i + 1 < k; ++i) gates.push_back(GateSpec::controlled(GateType::CX, i, i + 1));
  }
}

Circuit layered(std::size_t n, std::size_t reps, Entanglement ent,
                const std::vector<GateType>& layers) {
  if (n == 0) throw DimensionError("ansatz needs at least one qubit");
  std::vector<GateSpec> gates;
  int slot = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    entangle(gates, n, ent);
    for (GateType t : layers)
      for (std::size_t q = 0; q < n; ++q) {
        GateSpec g = GateSpec::single(t, static_cast<int>(q));
        g.slot = slot++;
        gates.push_back(g);
      }
  }
  return Circuit(n, std::move(gates),
                 std::vector<double>(static_cast<std::size_t>(slot),
                                     std::numeric_limits<double>::quiet_NaN()));
}

}  // namespace

Circuit real_amplitudes(std::size_t n_qubits, std::size_t reps, Entanglement ent) {
  return layered(n_qubits, reps, ent, {GateType::RY});
}

Circuit efficient_su2(std::size_t n_qubits, std::size_t reps, Entanglement ent,
                      RotationPair pair) {
  if (pair == RotationPair::RY_RZ) return layered(n_qubits, reps, ent, {GateType::RY, GateType::RZ});
  return layered(n_qubits, reps, ent, {GateType::RZ, GateType::RX});
}

AmplitudeDampingCircuit amplitude_damping_circuit(double theta) {
  AmplitudeDampingCircuit c{Circuit(2, {GateSpec::single(GateType::H, 0)}),
                            Circuit(2, {GateSpec::controlled(GateType::CRY, 0, 1, theta),
                                        GateSpec::controlled(GateType::CX, 1, 0)}),
                            0, 1};
  return c;
}

std::size_t pair_index(int control, int target, std::size_t n_qubits) {
  const auto c = static_cast<std::size_t>(control);
  const auto t = static_cast<std::size_t>(target);
  if (c == t || c >= n_qubits || t >= n_qubits) throw DimensionError("pair_index: invalid pair");
  return c * (n_qubits - 1) + (t < c ? t : t - 1);
}

std::pair<int, int> pair_at(std::size_t index, std::size_t n_qubits) {
  const std::size_t c = index / (n_qubits - 1);
  std::size_t t = index % (n_qubits - 1);
  if (t >= c) ++t;
  return {static_cast<int>(c), static_cast<int>(t)};
}

namespace {

/// Qubit domain: n single qubits, then the n(n-1) ordered (control, target) pairs.
void resample_qubits(GateSpec& g, const GateSampler& s, std::size_t n, Rng& rng) {
  const std::size_t pairs = n * (n - 1);
  std::vector<double> w = s.qubit_weights;
  if (w.empty()) w.assign(n + pairs, 1.0);
  if (w.size() != n + pairs) throw DimensionError("qubit weight vector has the wrong length");
  if (is_two_qubit(g.type))
    for (std::size_t i = 0; i < n; ++i) w[i] = 0.0;
  const std::size_t k = sample_index(w, rng);
  if (k < n) {
    g.control = -1;
    g.target = static_cast<int>(k);
  } else {
    const auto [c, t] = pair_at(k - n, n);
    g.control = c;
    g.target = t;
  }
}

GateType draw_type(const GateSampler& s, std::size_t n, Rng& rng) {
  if (s.gate_set.empty()) throw Error("gate set must be nonempty");
  std::vector<double> w(s.gate_set.size(), 1.0);
  if (!s.gate_weights.empty()) {
    if (s.gate_weights.size() != w.size()) throw DimensionError("gate weight vector length");
    w = s.gate_weights;
  }
  bool any = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (n < 2 && is_two_qubit(s.gate_set[i])) w[i] = 0.0;
    any = any || w[i] > 0.0;
  }
  if (!any) throw Error("no gate in the gate set can act on this many qubits");
  return s.gate_set[sample_index(w, rng)];
}

}  // namespace

GateSpec random_gate(const GateSampler& sampler, std::size_t n_qubits, Rng& rng) {
  GateSpec g;
  g.type = draw_type(sampler, n_qubits, rng);
  resample_qubits(g, sampler, n_qubits, rng);
  if (param_count(g.type) > 0)
    g.angle = std::uniform_real_distribution<double>(0.0, sampler.max_angle)(rng);
  return g;
}

std::string mutation_name(MutationType t) {
  switch (t) {
    case MutationType::Gate: return "gte";
    case MutationType::Qubit: return "qbt";
    case MutationType::Replace: return "rpl";
    case MutationType::Delete: return "dlt";
    case MutationType::Insert: return "ins";
  }
  return "?";
}

MutationType parse_mutation(const std::string& name) {
  for (MutationType t : {MutationType::Gate, MutationType::Qubit, MutationType::Replace,
                         MutationType::Delete, MutationType::Insert})
    if (mutation_name(t) == name) return t;
  throw Error("unknown mutation type '" + name + "'");
}

MutationResult mutate(const Circuit& c, std::size_t pos, MutationType type,
                      const GateSampler& sampler, Rng& rng) {
  std::vector<GateSpec> gates = c.gates();
  const std::size_t n = c.n_qubits();
  if (type == MutationType::Insert) {
    if (pos > gates.size()) throw Error("mutate: insert position out of range");
    gates.insert(gates.begin() + static_cast<std::ptrdiff_t>(pos), random_gate(sampler, n, rng));
    return {Circuit(n, std::move(gates), c.slot_values()), true};
  }
  if (gates.empty()) return {c, false};
  if (pos >= gates.size()) throw Error("mutate: position out of range");
  GateSpec& g = gates[pos];
  switch (type) {
    case MutationType::Gate: {
      const GateType old = g.type;
      g.type = draw_type(sampler, n, rng);
      if (is_two_qubit(g.type) && g.control < 0) resample_qubits(g, sampler, n, rng);
      if (param_count(old) != param_count(g.type)) {
        g.slot = -1;
        g.angle = param_count(g.type) > 0
                      ? std::uniform_real_distribution<double>(0.0, sampler.max_angle)(rng)
                      : 0.0;
      }
      break;
    }
    case MutationType::Qubit:
      resample_qubits(g, sampler, n, rng);
      break;
    case MutationType::Replace:
      g = random_gate(sampler, n, rng);
      break;
    case MutationType::Delete:
      gates.erase(gates.begin() + static_cast<std::ptrdiff_t>(pos));
      break;
    case MutationType::Insert:
      break;
  }
  return {Circuit(n, std::move(gates), c.slot_values()), true};
}

}  // namespace qhmm
