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
#include <string>
#include <utility>
#include <vector>

#include "qhmm/linalg.hpp"
#include "qhmm/rng.hpp"

namespace qhmm {

enum class GateType { X, Y, Z, H, P, RX, RY, RZ, CX, CRY, CRZ };

std::string gate_name(GateType t);
GateType parse_gate(const std::string& name);
/// True for the types that always carry a control (CX, CRY, CRZ). Any other
/// type may carry one too, acting as |0><0| (x) I + |1><1| (x) G.
bool is_two_qubit(GateType t);
std::size_t param_count(GateType t);
/// The 2x2 matrix of the gate, or of its target action for controlled gates.
ComplexMatrix gate_matrix(GateType t, double angle);

/// One gate of the genotype. The angle is stored inline unless `slot` names
/// an entry of the owning circuit's parameter vector.
struct GateSpec {
  GateType type = GateType::X;
  int control = -1;  // -1 for single-qubit gates
  int target = 0;
  double angle = 0.0;
  int slot = -1;

  static GateSpec single(GateType type, int target, double angle = 0.0);
  static GateSpec controlled(GateType type, int control, int target, double angle = 0.0);
  bool operator==(const GateSpec& o) const;
};

class Circuit {
 public:
  /// Slot parameters set to NaN are unbound.
  explicit Circuit(std::size_t n_qubits, std::vector<GateSpec> gates = {},
                   std::vector<double> parameters = {});

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return std::size_t{1} << n_qubits_; }
  const std::vector<GateSpec>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }

  /// Slot values, then the inline angles of parametric gates in gate order.
  std::vector<double> params() const;
  std::size_t num_params() const;
  Circuit with_params(const std::vector<double>& values) const;

  const std::vector<double>& slot_values() const { return parameters_; }
  Circuit bind(std::vector<double> slot_values) const;
  bool bound() const;

  double angle(const GateSpec& g) const;
  std::size_t two_qubit_count() const;

  /// `other` runs after this circuit; its slots are renumbered past ours.
  Circuit then(const Circuit& other) const;

 private:
  std::size_t n_qubits_;
  std::vector<GateSpec> gates_;
  std::vector<double> parameters_;
};

/// Applies the gate to the rows of `state` (a D x k block, D = 2^n_qubits).
/// Qubit 0 is the most significant bit of the row index.
void apply_gate(ComplexMatrix& state, std::size_t n_qubits, const GateSpec& g, double angle);

/// U = G_k ... G_1 through the in-place gate kernel. Throws on unbound slots.
UnitaryOperator compile(const Circuit& c);
/// Same unitary built from explicit Kronecker embeddings; a slow reference.
ComplexMatrix compile_reference(const Circuit& c);

enum class Entanglement { Full, Linear };
enum class RotationPair { RY_RZ, RZ_RX };

std::string entanglement_name(Entanglement e);
Entanglement parse_entanglement(const std::string& name);

/// Per repetition: CX entanglement block, then RY on every qubit. Parameters
/// are fresh slots, unbound.
Circuit real_amplitudes(std::size_t n_qubits, std::size_t reps, Entanglement ent);
/// Per repetition: CX entanglement block, then two rotation layers.
Circuit efficient_su2(std::size_t n_qubits, std::size_t reps, Entanglement ent,
                      RotationPair pair);

struct AmplitudeDampingCircuit {
  Circuit prep;  // H on the system qubit
  Circuit step;  // CRY(theta) system -> emission, then CX emission -> system
  int system_qubit = 0;
  int emission_qubit = 1;
};

AmplitudeDampingCircuit amplitude_damping_circuit(double theta);

/// Weights for random gate generation; empty vectors mean uniform.
struct GateSampler {
  std::vector<GateType> gate_set;
  std::vector<double> gate_weights;
  /// Over n single qubits followed by the n(n-1) ordered pairs (see pair_index);
  /// drawing a pair gives the gate a control.
  std::vector<double> qubit_weights;
  double max_angle = 8.0 * 3.14159265358979323846;
};

/// Index of the ordered pair (c, t), c != t, among n*(n-1) pairs.
std::size_t pair_index(int control, int target, std::size_t n_qubits);
std::pair<int, int> pair_at(std::size_t index, std::size_t n_qubits);

GateSpec random_gate(const GateSampler& sampler, std::size_t n_qubits, Rng& rng);

enum class MutationType { Gate, Qubit, Replace, Delete, Insert };

std::string mutation_name(MutationType t);  // gte, qbt, rpl, dlt, ins
MutationType parse_mutation(const std::string& name);

struct MutationResult {
  Circuit circuit;
  bool applied = true;  // false when a delete hit an empty circuit
};

MutationResult mutate(const Circuit& c, std::size_t pos, MutationType type,
                      const GateSampler& sampler, Rng& rng);

}  // namespace qhmm
