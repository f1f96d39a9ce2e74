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
#include <functional>
#include <string>
#include <vector>

#include "qhmm/linalg.hpp"

namespace qhmm {

/// Alphabet indices, first emitted symbol first.
using SymbolSequence = std::vector<int>;

/// "0110" when every symbol is a single digit, otherwise "10.2.11".
std::string format_sequence(const SymbolSequence& s);
SymbolSequence parse_sequence(const std::string& text);

/// Upper bound on dense table entries (m^t).
inline constexpr std::size_t kMaxTableEntries = std::size_t{1} << 22;

/// Dense probability table over all m^t sequences of one length. Entry order
/// is base-m with the first symbol most significant, i.e. lexicographic.
class DistributionTable {
 public:
  DistributionTable(std::size_t alphabet_size, std::size_t length);
  DistributionTable(std::size_t alphabet_size, std::size_t length, std::vector<double> values);

  std::size_t alphabet_size() const { return m_; }
  std::size_t length() const { return t_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t index) const { return values_[index]; }
  double& operator[](std::size_t index) { return values_[index]; }
  double probability(const SymbolSequence& s) const { return values_[index_of(s)]; }
  void set(const SymbolSequence& s, double p) { values_[index_of(s)] = p; }

  std::size_t index_of(const SymbolSequence& s) const;
  SymbolSequence sequence_at(std::size_t index) const;
  double total() const;
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t m_;
  std::size_t t_;
  std::vector<double> values_;
};

/// Number of dense entries m^t; throws Error when it exceeds kMaxTableEntries.
std::size_t table_size(std::size_t alphabet_size, std::size_t length);

/// Every contiguous length-t window of every corpus sequence, with multiplicity.
std::vector<SymbolSequence> subsequence_sample(const std::vector<SymbolSequence>& corpus,
                                               std::size_t t);

/// Relative frequencies of the given windows, all of which must have length t.
DistributionTable empirical_estimate(const std::vector<SymbolSequence>& windows,
                                     std::size_t alphabet_size, std::size_t t);

/// All sequences of length 0..max_len, ordered by length then lexicographically.
std::vector<SymbolSequence> enumerate_sequences(std::size_t alphabet_size, std::size_t max_len);

using SequenceFunction = std::function<double(const SymbolSequence&)>;

/// Sequence function backed by per-length tables; tables[i] must have length
/// i + 1. The empty sequence maps to 1 and longer sequences throw.
SequenceFunction table_function(const std::vector<DistributionTable>& tables);

struct HankelMatrix {
  std::vector<SymbolSequence> prefixes;
  std::vector<SymbolSequence> suffixes;
  RealMatrix values;  // values(i, j) = f(prefixes[i] ++ suffixes[j])
};

inline constexpr std::size_t kMaxHankelSide = 512;

HankelMatrix hankel(const SequenceFunction& f, std::size_t alphabet_size,
                    std::size_t max_prefix_len, std::size_t max_suffix_len);

struct OrderEstimate {
  std::size_t rank = 0;
  std::size_t classical_order = 0;
  std::size_t quantum_dim = 0;  // ceil(sqrt(rank)) rounded up to a power of two
};

OrderEstimate order_estimate(const HankelMatrix& h, double rel_tol = tol::kRank);

double delta(double p_target, double p_hypothesis);
/// max over sequences of |dL - dQ|; tables must agree in alphabet and length.
double divergence_max(const DistributionTable& dl, const DistributionTable& dq);
/// Mean of divergence_max over paired tables.
double divergence_avg(const std::vector<DistributionTable>& target,
                      const std::vector<DistributionTable>& hypothesis);
/// sum p log(p / max(q, epsilon)) over the support of dL.
double kl_divergence(const DistributionTable& dl, const DistributionTable& dq,
                     double epsilon = 1e-12);
/// Half the L1 distance.
double total_variation(const DistributionTable& dl, const DistributionTable& dq);

}  // namespace qhmm
