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
#include <vector>

#include "qhmm/linalg.hpp"

namespace qhmm {

/// Quantum operation in operator-sum form, with Kraus operators grouped by
/// the observable symbol they emit. Completeness runs over all operators of
/// all groups. Shapes are checked on construction; completeness is reported
/// by validate_cptp and enforced by the operations that need it.
class KrausChannel {
 public:
  KrausChannel(std::size_t dim, std::vector<std::string> symbols,
               std::vector<std::vector<ComplexMatrix>> groups);

  /// One symbol per Kraus operator, labelled "0", "1", ...
  static KrausChannel from_operators(std::vector<ComplexMatrix> ops);

  std::size_t dim() const { return dim_; }
  std::size_t num_symbols() const { return groups_.size(); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::vector<std::vector<ComplexMatrix>>& groups() const { return groups_; }
  const std::vector<ComplexMatrix>& group(std::size_t symbol) const { return groups_.at(symbol); }
  std::size_t symbol_index(const std::string& label) const;
  std::size_t total_operators() const;
  std::vector<ComplexMatrix> all_operators() const;

 private:
  std::size_t dim_;
  std::vector<std::string> symbols_;
  std::vector<std::vector<ComplexMatrix>> groups_;
};

struct CptpReport {
  bool complete = false;
  double max_violation = 0.0;  // max entrywise |sum K^dag K - I|
};

CptpReport validate_cptp(const KrausChannel& ch);
/// Throws InvariantError when the channel is not complete within 1e-9.
void require_cptp(const KrausChannel& ch);

/// sum over the symbol's Kraus operators of K rho K^dag; no normalization.
ComplexMatrix apply_symbol(const KrausChannel& ch, std::size_t symbol, const ComplexMatrix& rho);
ComplexMatrix apply(const KrausChannel& ch, const ComplexMatrix& rho);
DensityOperator apply(const KrausChannel& ch, const DensityOperator& rho);

/// tr(T_a rho), clamped to [0, 1].
double symbol_probability(const KrausChannel& ch, const DensityOperator& rho, std::size_t symbol);
double symbol_probability(const KrausChannel& ch, const DensityOperator& rho,
                          const std::string& symbol);

struct ChoiMatrix {
  std::size_t dim = 0;
  ComplexMatrix matrix;  // N^2 x N^2, entry (i*N+k, j*N+l) = T(|i><j|)(k, l)
};

ChoiMatrix choi(const KrausChannel& ch);
std::size_t kraus_rank(const KrausChannel& ch, double rel_tol = tol::kRank);

/// K_e[s, s'] = U[s*dimE + e, s'*dimE + e0], e = 0..dimE-1.
std::vector<ComplexMatrix> kraus_from_unitary(const UnitaryOperator& u, std::size_t dim_s,
                                              std::size_t dim_e, std::size_t e0);

/// Unitary on H_S (x) H_E whose Kraus family at e0 reproduces the channel.
/// Emission index k is assigned to the k-th Kraus operator in group order.
UnitaryOperator stinespring_dilate(const KrausChannel& ch, std::size_t dim_e, std::size_t e0);

/// Superoperator sum_K K (x) conj(K) acting on row-major vec(rho).
ComplexMatrix transfer_matrix(const KrausChannel& ch);

struct SteadyState {
  DensityOperator state;
  std::size_t multiplicity = 1;  // eigenvalue-1 multiplicity of the transfer matrix
  bool degenerate() const { return multiplicity > 1; }
};

/// Fixed point of the symbol-summed channel. For non-ergodic channels the
/// returned state is the Cesaro limit starting from the maximally mixed state.
SteadyState steady_state(const KrausChannel& ch);

namespace channels {
KrausChannel identity(std::size_t dim);
KrausChannel completely_depolarizing(std::size_t dim);
/// K0 = [[1,0],[0,sqrt(1-g)]], K1 = [[0,sqrt(g)],[0,0]]; one symbol each.
KrausChannel amplitude_damping(double gamma);
/// The four rank-1 projector family (1/sqrt 2){|0><0|, |1><1|, |+><+|, |-><-|}.
KrausChannel monras();
}  // namespace channels

}  // namespace qhmm
