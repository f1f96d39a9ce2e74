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

#include "qhmm/classical.hpp"

#include <algorithm>
#include <cmath>

#include "qhmm/rng.hpp"

namespace qhmm {

namespace {

constexpr double kStochasticTol = 1e-10;

void require_stochastic_columns(const RealMatrix& m, const char* what) {
  if ((m.array() < 0.0).any()) throw InvariantError(std::string(what) + " has negative entries");
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    if (std::abs(m.col(j).sum() - 1.0) > kStochasticTol)
      throw InvariantError(std::string(what) + " column " + std::to_string(j) +
                           " does not sum to 1");
}

void require_distribution(const RealVector& x) {
  if ((x.array() < 0.0).any() || std::abs(x.sum() - 1.0) > kStochasticTol)
    throw InvariantError("initial distribution must be nonnegative and sum to 1");
}

}  // namespace

ClassicalHmm::ClassicalHmm(std::vector<std::string> alphabet, RealMatrix a, RealMatrix b,
                           RealVector x0)
    : alphabet_(std::move(alphabet)), a_(std::move(a)), b_(std::move(b)), x0_(std::move(x0)) {
  const Eigen::Index n = a_.rows();
  if (n == 0 || a_.cols() != n) throw DimensionError("transition matrix must be square, n >= 1");
  if (alphabet_.empty()) throw DimensionError("alphabet must be nonempty");
  if (b_.rows() != static_cast<Eigen::Index>(alphabet_.size()) || b_.cols() != n)
    throw DimensionError("emission matrix must be m x n");
  if (x0_.size() != n) throw DimensionError("initial distribution must have n entries");
  require_stochastic_columns(a_, "transition matrix");
  require_stochastic_columns(b_, "emission matrix");
  require_distribution(x0_);
}

ClassicalHmm ClassicalHmm::from_rows(std::vector<std::string> alphabet,
                                     const std::vector<std::vector<double>>& transition_rows,
                                     const std::vector<std::vector<double>>& emission_rows,
                                     std::optional<RealVector> x0) {
  const std::size_t n = transition_rows.size();
  const std::size_t m = alphabet.size();
  if (emission_rows.size() != n) throw DimensionError("one emission row per state required");
  RealMatrix a(n, n);
  RealMatrix b(m, n);
  for (std::size_t from = 0; from < n; ++from) {
    if (transition_rows[from].size() != n) throw DimensionError("transition rows must have n entries");
    if (emission_rows[from].size() != m) throw DimensionError("emission rows must have m entries");
    for (std::size_t to = 0; to < n; ++to) a(to, from) = transition_rows[from][to];
    for (std::size_t s = 0; s < m; ++s) b(s, from) = emission_rows[from][s];
  }
  RealVector init = x0 ? *x0 : steady_state_classical(a, RealVector::Constant(n, 1.0 / n));
  return ClassicalHmm(std::move(alphabet), std::move(a), std::move(b), std::move(init));
}

ClassicalHmm ClassicalHmm::with_initial(RealVector x0) const {
  return ClassicalHmm(alphabet_, a_, b_, std::move(x0));
}

std::vector<RealMatrix> observable_operators(const ClassicalHmm& h) {
  std::vector<RealMatrix> ops;
  ops.reserve(h.num_symbols());
  for (std::size_t s = 0; s < h.num_symbols(); ++s)
    ops.push_back(h.transition() * h.emission().row(static_cast<Eigen::Index>(s)).asDiagonal());
  return ops;
}

double sequence_probability(const ClassicalHmm& h, const SymbolSequence& s) {
  const auto ops = observable_operators(h);
  RealVector x = h.initial();
  for (int a : s) {
    if (a < 0 || static_cast<std::size_t>(a) >= h.num_symbols())
      throw Error("symbol " + std::to_string(a) + " outside the alphabet");
    x = ops[static_cast<std::size_t>(a)] * x;
  }
  return std::clamp(x.sum(), 0.0, 1.0);
}

namespace {

void descend(const std::vector<RealMatrix>& ops, const RealVector& x, std::size_t depth,
             std::size_t index, std::vector<DistributionTable>& out) {
  const std::size_t m = ops.size();
  for (std::size_t a = 0; a < m; ++a) {
    RealVector y = ops[a] * x;
    const double p = y.sum();
    const std::size_t child = index * m + a;
    out[depth][child] = std::max(p, 0.0);
    if (depth + 1 < out.size() && p > 1e-15) descend(ops, y, depth + 1, child, out);
  }
}

}  // namespace

std::vector<DistributionTable> distributions_upto(const ClassicalHmm& h, std::size_t n) {
  std::vector<DistributionTable> out;
  for (std::size_t t = 1; t <= n; ++t) out.emplace_back(h.num_symbols(), t);
  if (n > 0) descend(observable_operators(h), h.initial(), 0, 0, out);
  return out;
}

DistributionTable distribution(const ClassicalHmm& h, std::size_t t) {
  if (t == 0) return DistributionTable(h.num_symbols(), 0, {1.0});
  table_size(h.num_symbols(), t);
  return std::move(distributions_upto(h, t).back());
}

RealVector steady_state_classical(const RealMatrix& a, const RealVector& seed) {
  const FixedSpaceProjection p =
      project_onto_fixed_space(a.cast<Complex>(), seed.cast<Complex>());
  RealVector x = p.vector.real().cwiseMax(0.0);
  const double total = x.sum();
  if (total <= 0.0) throw Error("steady state: projected distribution vanished");
  return x / total;
}

RealVector steady_state_classical(const ClassicalHmm& h) {
  return steady_state_classical(h.transition(), h.initial());
}

std::vector<SymbolSequence> sample(const ClassicalHmm& h, std::size_t t, std::size_t n_seq,
                                   std::uint64_t seed) {
  Rng rng = stream(seed);
  const std::size_t n = h.num_states();
  auto column = [](const RealMatrix& mat, std::size_t j) {
    std::vector<double> w(static_cast<std::size_t>(mat.rows()));
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] = mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return w;
  };
  std::vector<std::vector<double>> to(n), emit(n);
  for (std::size_t j = 0; j < n; ++j) {
    to[j] = column(h.transition(), j);
    emit[j] = column(h.emission(), j);
  }
  const std::vector<double> init(h.initial().data(), h.initial().data() + n);
  std::vector<SymbolSequence> out(n_seq, SymbolSequence(t));
  for (auto& seq : out) {
    std::size_t state = sample_index(init, rng);
    for (std::size_t k = 0; k < t; ++k) {
      seq[k] = static_cast<int>(sample_index(emit[state], rng));
      state = sample_index(to[state], rng);
    }
  }
  return out;
}

namespace fixtures {

ClassicalHmm market() {
  return ClassicalHmm::from_rows({"0", "1"},
                                 {{0.50, 0.10, 0.15, 0.25},
                                  {0.10, 0.50, 0.25, 0.15},
                                  {0.25, 0.15, 0.50, 0.10},
                                  {0.15, 0.25, 0.10, 0.50}},
                                 {{0.8, 0.2}, {0.2, 0.8}, {0.4, 0.6}, {0.6, 0.4}});
}

ClassicalHmm gaussian4() {
  return ClassicalHmm::from_rows({"0", "1", "2", "3"},
                                 {{0.60, 0.25, 0.05, 0.10},
                                  {0.05, 0.15, 0.05, 0.75},
                                  {0.75, 0.05, 0.15, 0.05},
                                  {0.10, 0.05, 0.65, 0.20}},
                                 {{0.00, 0.50, 0.50, 0.00},
                                  {0.01, 0.49, 0.49, 0.01},
                                  {0.13, 0.37, 0.37, 0.13},
                                  {0.22, 0.28, 0.28, 0.22}});
}

std::map<std::string, ClassicalHmm> all() {
  std::map<std::string, ClassicalHmm> out;
  out.emplace("market", market());
  out.emplace("gaussian4", gaussian4());
  return out;
}

}  // namespace fixtures

}  // namespace qhmm
