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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qhmm/language.hpp"
#include "qhmm/linalg.hpp"

namespace qhmm {

/// Discrete HMM. A is column-stochastic (A(to, from)); B(a, i) is the
/// probability of emitting symbol a from state i, so columns of B sum to 1.
class ClassicalHmm {
 public:
  ClassicalHmm(std::vector<std::string> alphabet, RealMatrix a, RealMatrix b, RealVector x0);

  /// Builds from per-state rows as tables are usually written: transition
  /// row i lists P(to | from = i) and emission row i lists P(symbol | i).
  /// x0 defaults to the stationary distribution.
  static ClassicalHmm from_rows(std::vector<std::string> alphabet,
                                const std::vector<std::vector<double>>& transition_rows,
                                const std::vector<std::vector<double>>& emission_rows,
                                std::optional<RealVector> x0 = std::nullopt);

  const std::vector<std::string>& alphabet() const { return alphabet_; }
  std::size_t num_symbols() const { return alphabet_.size(); }
  std::size_t num_states() const { return static_cast<std::size_t>(a_.rows()); }
  const RealMatrix& transition() const { return a_; }
  const RealMatrix& emission() const { return b_; }
  const RealVector& initial() const { return x0_; }

  ClassicalHmm with_initial(RealVector x0) const;

 private:
  std::vector<std::string> alphabet_;
  RealMatrix a_;
  RealMatrix b_;
  RealVector x0_;
};

/// T_a = A diag(B(a, :)).
std::vector<RealMatrix> observable_operators(const ClassicalHmm& h);

/// 1^T T_{a_t} ... T_{a_1} x0.
double sequence_probability(const ClassicalHmm& h, const SymbolSequence& s);

DistributionTable distribution(const ClassicalHmm& h, std::size_t t);
/// Tables for lengths 1..n from a single prefix-tree traversal.
std::vector<DistributionTable> distributions_upto(const ClassicalHmm& h, std::size_t n);

/// Fixed point of A reached from the seed distribution (x0 when omitted).
RealVector steady_state_classical(const ClassicalHmm& h);
RealVector steady_state_classical(const RealMatrix& a, const RealVector& seed);

std::vector<SymbolSequence> sample(const ClassicalHmm& h, std::size_t t, std::size_t n_seq,
                                   std::uint64_t seed);

namespace fixtures {
ClassicalHmm market();
ClassicalHmm gaussian4();
std::map<std::string, ClassicalHmm> all();
}  // namespace fixtures

}  // namespace qhmm
