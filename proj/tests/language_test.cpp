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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qhmm/classical.hpp"
#include "qhmm/language.hpp"
#include "qhmm/model.hpp"
#include "test_util.hpp"

namespace qhmm {
namespace {

TEST(Sequences, FormatAndParse) {
  EXPECT_EQ(format_sequence({0, 1, 1, 0}), "0110");
  EXPECT_EQ(format_sequence({10, 2, 11}), "10.2.11");
  EXPECT_EQ(parse_sequence("0110"), (SymbolSequence{0, 1, 1, 0}));
  EXPECT_EQ(parse_sequence("10.2.11"), (SymbolSequence{10, 2, 11}));
  EXPECT_THROW(parse_sequence("0a1"), Error);
}

TEST(DistributionTableTest, LexicographicLayout) {
  DistributionTable t(3, 2);
  EXPECT_EQ(t.size(), 9u);
  EXPECT_EQ(t.index_of({1, 2}), 5u);
  EXPECT_EQ(t.sequence_at(7), (SymbolSequence{2, 1}));
  EXPECT_THROW(t.index_of({3, 0}), Error);
  EXPECT_THROW(t.index_of({0}), DimensionError);
  EXPECT_THROW(DistributionTable(2, 23), Error);
}

TEST(EnumerateSequences, OrderedByLengthThenLex) {
  const auto s = enumerate_sequences(2, 2);
  const std::vector<SymbolSequence> expect{{}, {0}, {1}, {0, 0}, {0, 1}, {1, 0}, {1, 1}};
  EXPECT_EQ(s, expect);
}

TEST(SubsequenceSample, Windows) {
  const auto w = subsequence_sample({{0, 1, 0, 1}}, 2);
  const std::vector<SymbolSequence> expect{{0, 1}, {1, 0}, {0, 1}};
  EXPECT_EQ(w, expect);
  EXPECT_TRUE(subsequence_sample({{0, 1}}, 3).empty());
  const std::vector<SymbolSequence> corpus{{0, 1, 1}, {1, 1, 0}};
  EXPECT_EQ(subsequence_sample(corpus, 3), corpus);
  EXPECT_THROW(subsequence_sample(corpus, 0), Error);
}

TEST(EmpiricalEstimate, Basics) {
  const DistributionTable u = empirical_estimate({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, 2, 2);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(u[i], 0.25);
  const DistributionTable p = empirical_estimate({{1, 0}, {1, 0}, {1, 0}}, 2, 2);
  EXPECT_DOUBLE_EQ(p.probability({1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(p.total(), 1.0);
  EXPECT_THROW(empirical_estimate({}, 2, 2), Error);
}

TEST(EmpiricalEstimate, MarketWindowsWithinSamplingBound) {
  const ClassicalHmm h = fixtures::market();
  // One long run gives ~1e5 overlapping windows.
  const auto corpus = sample(h, 100002, 1, 5);
  const auto windows = subsequence_sample(corpus, 3);
  ASSERT_EQ(windows.size(), 100000u);
  const DistributionTable emp = empirical_estimate(windows, 2, 3);
  const DistributionTable exact = distribution(h, 3);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    // Overlapping windows are correlated; allow 3 sigma with a 4x variance factor.
    const double sigma = std::sqrt(exact[i] * (1.0 - exact[i]) / 100000.0);
    EXPECT_LT(std::abs(emp[i] - exact[i]), 3.0 * 2.0 * sigma) << format_sequence(exact.sequence_at(i));
  }
}

TEST(Hankel, ConstructionOracleAndRanks) {
  const QhmmKraus ad = to_kraus(models::amplitude_damping(testing::kPi / 2.0));
  const SequenceFunction f = [&](const SymbolSequence& s) { return sequence_probability(ad, s); };
  const HankelMatrix h = hankel(f, 2, 2, 2);
  ASSERT_EQ(h.values.rows(), 7);
  for (Eigen::Index i = 0; i < 7; ++i) {
    for (Eigen::Index j = 0; j < 7; ++j) {
      SymbolSequence ps = h.prefixes[i];
      ps.insert(ps.end(), h.suffixes[j].begin(), h.suffixes[j].end());
      EXPECT_DOUBLE_EQ(h.values(i, j), f(ps));
    }
  }
  // Row e is (2/3) row 0 + 2 row 1 and the length-2 rows are multiples of
  // those, so this 7 x 7 block has rank 2.
  EXPECT_EQ(numerical_rank(h.values), 2u);

  const ClassicalHmm m = fixtures::market();
  const HankelMatrix hm =
      hankel([&](const SymbolSequence& s) { return sequence_probability(m, s); }, 2, 3, 3);
  const OrderEstimate om = order_estimate(hm);
  EXPECT_EQ(om.rank, 4u);
  EXPECT_EQ(om.classical_order, 4u);
  EXPECT_EQ(om.quantum_dim, 2u);

  const QhmmKraus mon = models::monras();
  const HankelMatrix hmon =
      hankel([&](const SymbolSequence& s) { return sequence_probability(mon, s); }, 4, 3, 3);
  const OrderEstimate o = order_estimate(hmon);
  EXPECT_EQ(o.rank, 3u);
  EXPECT_EQ(o.quantum_dim, 2u);

  const HankelMatrix one = hankel([](const SymbolSequence& s) { return s.empty() ? 1.0 : 0.0; }, 2, 2, 2);
  const OrderEstimate o1 = order_estimate(one);
  EXPECT_EQ(o1.rank, 1u);
  EXPECT_EQ(o1.quantum_dim, 1u);

  EXPECT_THROW(hankel(f, 2, 9, 1), Error);
}

TEST(TableFunction, ServesTablesAndRejectsLonger) {
  const auto tables = distributions_upto(fixtures::market(), 3);
  const SequenceFunction f = table_function(tables);
  EXPECT_DOUBLE_EQ(f({}), 1.0);
  EXPECT_DOUBLE_EQ(f({1, 0}), tables[1].probability({1, 0}));
  EXPECT_THROW(f({0, 0, 0, 0}), Error);
}

TEST(Divergences, ClosedForms) {
  EXPECT_DOUBLE_EQ(delta(0.5, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(delta(0.75, 0.5), 0.25);

  DistributionTable a(2, 2), b(2, 2);
  a.set({0, 1}, 1.0);
  b.set({1, 1}, 1.0);
  EXPECT_DOUBLE_EQ(divergence_max(a, a), 0.0);
  EXPECT_DOUBLE_EQ(divergence_max(a, b), 1.0);
  EXPECT_THROW(divergence_max(a, DistributionTable(2, 3)), DimensionError);

  std::vector<DistributionTable> t, h;
  for (std::size_t n = 1; n <= 5; ++n) {
    DistributionTable x(2, n);
    x[0] = 1.0;
    t.push_back(x);
    if (n == 3) {
      x[0] = 0.9;
      x[1] = 0.1;
    }
    h.push_back(x);
  }
  EXPECT_DOUBLE_EQ(divergence_avg(t, t), 0.0);
  EXPECT_NEAR(divergence_avg(t, h), 0.02, 1e-15);

  DistributionTable p(2, 1, {1.0, 0.0}), q(2, 1, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(kl_divergence(p, p), 0.0);
  EXPECT_NEAR(kl_divergence(p, q), std::log(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(total_variation(p, q), 0.5);
}

TEST(Divergences, PinskerOnRandomTables) {
  std::mt19937_64 rng(19);
  std::gamma_distribution<double> g(0.7, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(8), y(8);
    double sx = 0.0, sy = 0.0;
    for (int i = 0; i < 8; ++i) {
      x[i] = g(rng);
      y[i] = g(rng);
      sx += x[i];
      sy += y[i];
    }
    for (int i = 0; i < 8; ++i) {
      x[i] /= sx;
      y[i] /= sy;
    }
    const DistributionTable p(2, 3, x), q(2, 3, y);
    const double kl = kl_divergence(p, q);
    const double l1 = 2.0 * total_variation(p, q);
    EXPECT_GE(kl, 0.0);
    EXPECT_GE(kl + 1e-12, 0.5 * l1 * l1);
  }
}

}  // namespace
}  // namespace qhmm
