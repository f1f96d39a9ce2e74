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

#include "qhmm/language.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qhmm {

std::string format_sequence(const SymbolSequence& s) {
  const bool digits = std::all_of(s.begin(), s.end(), [](int a) { return a >= 0 && a < 10; });
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!digits && i > 0) out += '.';
    out += std::to_string(s[i]);
  }
  return out;
}

SymbolSequence parse_sequence(const std::string& text) {
  SymbolSequence out;
  if (text.find('.') != std::string::npos) {
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, '.')) {
      if (part.empty()) throw Error("malformed sequence '" + text + "'");
      out.push_back(std::stoi(part));
    }
    return out;
  }
  for (char c : text) {
    if (c < '0' || c > '9') throw Error("malformed sequence '" + text + "'");
    out.push_back(c - '0');
  }
  return out;
}

std::size_t table_size(std::size_t alphabet_size, std::size_t length) {
  if (alphabet_size == 0) throw Error("alphabet must be nonempty");
  std::size_t n = 1;
  for (std::size_t i = 0; i < length; ++i) {
    n *= alphabet_size;
    if (n > kMaxTableEntries)
      throw Error("distribution table too large: " + std::to_string(alphabet_size) + "^" +
                  std::to_string(length) + " entries");
  }
  return n;
}

DistributionTable::DistributionTable(std::size_t alphabet_size, std::size_t length)
    : m_(alphabet_size), t_(length), values_(table_size(alphabet_size, length), 0.0) {}

DistributionTable::DistributionTable(std::size_t alphabet_size, std::size_t length,
                                     std::vector<double> values)
    : m_(alphabet_size), t_(length), values_(std::move(values)) {
  if (values_.size() != table_size(alphabet_size, length))
    throw DimensionError("distribution table: value count does not match m^t");
}

std::size_t DistributionTable::index_of(const SymbolSequence& s) const {
  if (s.size() != t_) throw DimensionError("sequence length does not match table length");
  std::size_t idx = 0;
  for (int a : s) {
    if (a < 0 || static_cast<std::size_t>(a) >= m_)
      throw Error("symbol " + std::to_string(a) + " outside the alphabet");
    idx = idx * m_ + static_cast<std::size_t>(a);
  }
  return idx;
}

SymbolSequence DistributionTable::sequence_at(std::size_t index) const {
  SymbolSequence s(t_);
  for (std::size_t i = t_; i-- > 0;) {
    s[i] = static_cast<int>(index % m_);
    index /= m_;
  }
  return s;
}

double DistributionTable::total() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum;
}

std::vector<SymbolSequence> subsequence_sample(const std::vector<SymbolSequence>& corpus,
                                               std::size_t t) {
  if (t == 0) throw Error("window length must be at least 1");
  std::vector<SymbolSequence> out;
  for (const auto& seq : corpus) {
    if (seq.size() < t) continue;
    for (std::size_t i = 0; i + t <= seq.size(); ++i)
      out.emplace_back(seq.begin() + static_cast<std::ptrdiff_t>(i),
                       seq.begin() + static_cast<std::ptrdiff_t>(i + t));
  }
  return out;
}

DistributionTable empirical_estimate(const std::vector<SymbolSequence>& windows,
                                     std::size_t alphabet_size, std::size_t t) {
  if (windows.empty()) throw Error("empirical estimate needs at least one window");
  DistributionTable table(alphabet_size, t);
  std::vector<std::size_t> counts(table.size(), 0);
  for (const auto& w : windows) ++counts[table.index_of(w)];
  const double n = static_cast<double>(windows.size());
  for (std::size_t i = 0; i < counts.size(); ++i) table[i] = static_cast<double>(counts[i]) / n;
  return table;
}

std::vector<SymbolSequence> enumerate_sequences(std::size_t alphabet_size, std::size_t max_len) {
  std::vector<SymbolSequence> out;
  for (std::size_t len = 0; len <= max_len; ++len) {
    DistributionTable shape(alphabet_size, len);
    for (std::size_t i = 0; i < shape.size(); ++i) out.push_back(shape.sequence_at(i));
  }
  return out;
}

SequenceFunction table_function(const std::vector<DistributionTable>& tables) {
  for (std::size_t i = 0; i < tables.size(); ++i)
    if (tables[i].length() != i + 1) throw Error("table_function: tables must cover lengths 1..n");
  return [tables](const SymbolSequence& s) -> double {
    if (s.empty()) return 1.0;
    if (s.size() > tables.size())
      throw Error("sequence longer than the available target tables");
    return tables[s.size() - 1].probability(s);
  };
}

HankelMatrix hankel(const SequenceFunction& f, std::size_t alphabet_size,
                    std::size_t max_prefix_len, std::size_t max_suffix_len) {
  // Check the budget before materializing anything.
  auto side = [&](std::size_t len) {
    std::size_t total = 0, level = 1;
    for (std::size_t l = 0; l <= len; ++l) {
      total += level;
      if (total > kMaxHankelSide) return total;
      level *= alphabet_size;
    }
    return total;
  };
  if (side(max_prefix_len) > kMaxHankelSide || side(max_suffix_len) > kMaxHankelSide)
    throw Error("Hankel matrix exceeds the 512 x 512 budget");

  HankelMatrix h;
  h.prefixes = enumerate_sequences(alphabet_size, max_prefix_len);
  h.suffixes = enumerate_sequences(alphabet_size, max_suffix_len);
  h.values.resize(static_cast<Eigen::Index>(h.prefixes.size()),
                  static_cast<Eigen::Index>(h.suffixes.size()));
  SymbolSequence ps;
  for (std::size_t i = 0; i < h.prefixes.size(); ++i)
    for (std::size_t j = 0; j < h.suffixes.size(); ++j) {
      ps = h.prefixes[i];
      ps.insert(ps.end(), h.suffixes[j].begin(), h.suffixes[j].end());
      h.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f(ps);
    }
  return h;
}

OrderEstimate order_estimate(const HankelMatrix& h, double rel_tol) {
  OrderEstimate e;
  e.rank = numerical_rank(h.values, rel_tol);
  e.classical_order = e.rank;
  if (e.rank == 0) return e;
  std::size_t root = 0;
  while (root * root < e.rank) ++root;
  e.quantum_dim = 1;
  while (e.quantum_dim < root) e.quantum_dim *= 2;
  return e;
}

double delta(double p_target, double p_hypothesis) { return std::abs(p_target - p_hypothesis); }

namespace {
void require_same_shape(const DistributionTable& a, const DistributionTable& b) {
  if (a.alphabet_size() != b.alphabet_size() || a.length() != b.length())
    throw DimensionError("distribution tables differ in alphabet or length");
}
}  // namespace

double divergence_max(const DistributionTable& dl, const DistributionTable& dq) {
  require_same_shape(dl, dq);
  double worst = 0.0;
  for (std::size_t i = 0; i < dl.size(); ++i) worst = std::max(worst, delta(dl[i], dq[i]));
  return worst;
}

double divergence_avg(const std::vector<DistributionTable>& target,
                      const std::vector<DistributionTable>& hypothesis) {
  if (target.size() != hypothesis.size()) throw DimensionError("divergence_avg: length mismatch");
  if (target.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) sum += divergence_max(target[i], hypothesis[i]);
  return sum / static_cast<double>(target.size());
}

double kl_divergence(const DistributionTable& dl, const DistributionTable& dq, double epsilon) {
  require_same_shape(dl, dq);
  if (!(epsilon > 0.0)) throw Error("kl_divergence: epsilon must be positive");
  double kl = 0.0;
  for (std::size_t i = 0; i < dl.size(); ++i) {
    const double p = dl[i];
    if (p <= 0.0) continue;
    kl += p * std::log(p / std::max(dq[i], epsilon));
  }
  return std::max(kl, 0.0);
}

double total_variation(const DistributionTable& dl, const DistributionTable& dq) {
  require_same_shape(dl, dq);
  double sum = 0.0;
  for (std::size_t i = 0; i < dl.size(); ++i) sum += std::abs(dl[i] - dq[i]);
  return 0.5 * sum;
}

}  // namespace qhmm
