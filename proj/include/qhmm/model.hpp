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
#include <string>
#include <vector>

#include "qhmm/channel.hpp"
#include "qhmm/circuit.hpp"
#include "qhmm/classical.hpp"
#include "qhmm/language.hpp"
#include "qhmm/linalg.hpp"

namespace qhmm {

/// QHMM in operator-sum form: one Kraus group per symbol plus an initial state.
class QhmmKraus {
 public:
  QhmmKraus(KrausChannel channel, DensityOperator rho0);

  const std::vector<std::string>& alphabet() const { return channel_.symbols(); }
  std::size_t num_symbols() const { return channel_.num_symbols(); }
  std::size_t dim() const { return channel_.dim(); }
  const KrausChannel& channel() const { return channel_; }
  const DensityOperator& rho0() const { return rho0_; }

 private:
  KrausChannel channel_;
  DensityOperator rho0_;
};

/// What happens to the emission register between steps.
enum class ResetMode { Reset, Carry };

/// Which register is read out each step. Emission is the usual dilation
/// reading; State reads the system register (which keeps its collapsed
/// value) and resets the other one.
enum class MeasuredRegister { Emission, State };

/// QHMM as a unitary on H_S (x) H_E followed by a projective measurement.
/// symbol_map[k] is the symbol emitted for basis outcome k of the measured
/// register; every symbol must own at least one outcome.
class QhmmUnitary {
 public:
  QhmmUnitary(std::vector<std::string> alphabet, std::size_t dim_s, std::size_t dim_e,
              UnitaryOperator u, std::vector<int> symbol_map, DensityOperator rho0,
              std::size_t e0 = 0, ResetMode reset = ResetMode::Reset,
              MeasuredRegister measured = MeasuredRegister::Emission);

  /// Outcome k maps to symbol k mod m.
  static std::vector<int> modular_symbol_map(std::size_t outcomes, std::size_t m);

  const std::vector<std::string>& alphabet() const { return alphabet_; }
  std::size_t num_symbols() const { return alphabet_.size(); }
  std::size_t dim_s() const { return dim_s_; }
  std::size_t dim_e() const { return dim_e_; }
  const UnitaryOperator& unitary() const { return u_; }
  const std::vector<int>& symbol_map() const { return symbol_map_; }
  const DensityOperator& rho0() const { return rho0_; }
  std::size_t e0() const { return e0_; }
  ResetMode reset_mode() const { return reset_; }
  MeasuredRegister measured() const { return measured_; }
  std::size_t measured_dim() const {
    return measured_ == MeasuredRegister::Emission ? dim_e_ : dim_s_;
  }

 private:
  std::vector<std::string> alphabet_;
  std::size_t dim_s_;
  std::size_t dim_e_;
  UnitaryOperator u_;
  std::vector<int> symbol_map_;
  DensityOperator rho0_;
  std::size_t e0_;
  ResetMode reset_;
  MeasuredRegister measured_;
};

/// Groups the Kraus family of the unitary by symbol. Throws for ResetMode::Carry.
QhmmKraus to_kraus(const QhmmUnitary& q);
/// Stinespring dilation; emission indices are assigned per Kraus operator in
/// group order, so each symbol owns a consecutive block of outcomes.
QhmmUnitary from_kraus(const QhmmKraus& q, std::size_t dim_e);

/// K_a^{ij} = sqrt(O_a[i, j]) |i><j| for every positive entry of T_a, with rho0 = diag(x0).
QhmmKraus quantize_classical(const ClassicalHmm& h);

/// tr(T_{a_t} o ... o T_{a_1}(rho0)).
double sequence_probability(const QhmmKraus& q, const SymbolSequence& s);
DistributionTable distribution(const QhmmKraus& q, std::size_t t);
/// Tables for lengths 1..n from one traversal of the branch tree. Branches
/// with less than 1e-15 mass are pruned.
std::vector<DistributionTable> distributions_upto(const QhmmKraus& q, std::size_t n);

/// Trajectory simulation: one pure-state run per shot, each with its own
/// generator derived from (seed, shot). threads <= 0 uses the OpenMP default.
/// Results do not depend on the thread count.
std::vector<SymbolSequence> simulate(const QhmmUnitary& q, std::size_t t, std::size_t shots,
                                     std::uint64_t seed, int threads = 0);
/// Single-threaded reference for simulate.
std::vector<SymbolSequence> simulate_serial(const QhmmUnitary& q, std::size_t t,
                                            std::size_t shots, std::uint64_t seed);

SteadyState steady_state(const QhmmKraus& q);

namespace models {
/// Four rank-1 projectors on a qubit, rho0 = I/2.
QhmmKraus monras();
/// The two-qubit amplitude-damping step with rho0 = |+><+| on the system
/// qubit. MeasuredRegister::State is the designation that matches the
/// reference Hankel table; Emission is the plain dilation reading.
QhmmUnitary amplitude_damping(double theta,
                              MeasuredRegister measured = MeasuredRegister::State);
QhmmKraus market();
QhmmKraus gaussian4();
}  // namespace models

}  // namespace qhmm
