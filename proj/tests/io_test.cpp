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
#include <filesystem>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "qhmm/io.hpp"
#include "test_util.hpp"

namespace qhmm {
namespace {

namespace fs = std::filesystem;

std::string temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qhmm_io_test";
  fs::create_directories(dir);
  return (dir / name).string();
}

void expect_same_process(const QhmmKraus& a, const QhmmKraus& b, std::size_t n) {
  for (const SymbolSequence& s : enumerate_sequences(a.num_symbols(), n))
    EXPECT_NEAR(sequence_probability(a, s), sequence_probability(b, s), 1e-15) << format_sequence(s);
}

TEST(FormatDouble, RoundTrips) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 500; ++i) {
    const double v = u(rng) * std::pow(10.0, i % 20 - 10);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.25), "0.25");
  EXPECT_EQ(format_double(1.0), "1");
}

TEST(Json, MatrixRoundTrip) {
  std::mt19937_64 rng(8);
  const ComplexMatrix m = testing::gaussian_matrix(3, 5, rng);
  const ComplexMatrix back = matrix_from_json(Json::parse(to_json(m).dump()));
  EXPECT_EQ(back, m);
  EXPECT_THROW(matrix_from_json(Json::parse(R"({"rows": 2, "cols": 2, "re": [1, 2, 3]})")), DimensionError);
  EXPECT_ANY_THROW(matrix_from_json(Json::parse("[[1, 2], [3]]")));
}

TEST(Json, ModelRoundTrips) {
  const QhmmKraus mon = models::monras();
  const LoadedModel k = model_from_json(Json::parse(dump(to_json(mon))));
  ASSERT_TRUE(k.kraus);
  expect_same_process(mon, *k.kraus, 3);

  const QhmmUnitary ad = models::amplitude_damping(0.7, MeasuredRegister::Emission);
  const LoadedModel u = model_from_json(Json::parse(dump(to_json(ad))));
  ASSERT_TRUE(u.unitary);
  EXPECT_EQ(u.unitary->measured(), MeasuredRegister::Emission);
  expect_same_process(to_kraus(ad), to_kraus(*u.unitary), 3);

  const ClassicalHmm h = fixtures::market();
  const LoadedModel c = model_from_json(Json::parse(dump(to_json(h))));
  ASSERT_TRUE(c.classical);
  for (const SymbolSequence& s : enumerate_sequences(2, 4))
    EXPECT_DOUBLE_EQ(sequence_probability(h, s), sequence_probability(*c.classical, s));
}

TEST(Json, CircuitHypothesisRoundTrip) {
  Hypothesis hyp;
  hyp.state_qubits = 1;
  hyp.emission_qubits = 1;
  hyp.circuit = Circuit(2, {GateSpec::single(GateType::RY, 0, 0.4), GateSpec::controlled(GateType::CX, 0, 1),
                            GateSpec::controlled(GateType::CRZ, 1, 0, -1.25)});
  const LoadedModel m = model_from_json(Json::parse(dump(to_json(hyp, 2))));
  ASSERT_TRUE(m.hypothesis);
  EXPECT_EQ(m.alphabet_size, 2u);
  EXPECT_EQ(m.hypothesis->circuit.gates(), hyp.circuit.gates());
  EXPECT_LT(max_abs_entry(compile(m.hypothesis->circuit).matrix() - compile(hyp.circuit).matrix()), 1e-15);

  Json bad = to_json(hyp, 2);
  bad["state_qubits"] = 2;
  EXPECT_THROW(model_from_json(bad), DimensionError);
  Json wrong_params = to_json(hyp.circuit);
  wrong_params["gates"][0]["p"] = Json::array();
  EXPECT_THROW(circuit_from_json(wrong_params), Error);
}

TEST(Json, KindInferenceAndErrors) {
  EXPECT_THROW(model_from_json(Json::parse(R"({"foo": 1})")), Error);
  Json j = to_json(models::amplitude_damping(0.3));
  j.erase("kind");
  EXPECT_EQ(model_from_json(j).kind, "unitary");
  j["reset"] = "sometimes";
  EXPECT_THROW(model_from_json(j), Error);
}

TEST(LoadModel, BuiltinsAndFiles) {
  for (const std::string& name : builtin_models()) {
    const LoadedModel m = load_model(name);
    const auto tables = model_distributions(m, 3);
    ASSERT_EQ(tables.size(), 3u) << name;
    for (const DistributionTable& t : tables) EXPECT_NEAR(t.total(), 1.0, 1e-12) << name;
  }
  EXPECT_THROW(load_model("builtin:nope"), Error);
  EXPECT_THROW(load_model(temp_path("missing.json")), Error);

  const std::string bad = temp_path("bad.json");
  write_text(bad, "{not json");
  EXPECT_THROW(load_model(bad), Error);

  const std::string good = temp_path("monras.json");
  write_text(good, dump(to_json(models::monras())));
  expect_same_process(as_kraus(load_model(good)), models::monras(), 2);
}

TEST(AsUnitary, DilatesKrausModels) {
  const LoadedModel m = load_model("builtin:monras");
  expect_same_process(to_kraus(as_unitary(m)), models::monras(), 3);
}

TEST(Csv, TablesRoundTrip) {
  const auto tables = distributions_upto(fixtures::market(), 3);
  const std::string csv = tables_to_csv(tables);
  EXPECT_EQ(csv.substr(0, 21), "sequence,probability\n");
  const auto back = tables_from_csv(csv);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t n = 0; n < 3; ++n)
    for (std::size_t i = 0; i < back[n].size(); ++i) EXPECT_EQ(back[n][i], tables[n][i]);
}

TEST(Csv, SparseRowsAndErrors) {
  const auto t = tables_from_csv("sequence,probability\n0,0.75\n1,0.25\n00,0.75\n", 2);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_DOUBLE_EQ(t[1].probability({0, 0}), 0.75);
  EXPECT_DOUBLE_EQ(t[1].probability({1, 1}), 0.0);
  EXPECT_THROW(tables_from_csv("0 0.5\n"), Error);
  // Length 2 without length 1 is not contiguous.
  EXPECT_THROW(tables_from_csv("00,1\n"), Error);
}

TEST(Corpus, TextRoundTripAndTarget) {
  const std::vector<SymbolSequence> corpus{{0, 1, 1}, {1, 0}, {0}};
  EXPECT_EQ(corpus_from_text(corpus_to_text(corpus)), corpus);
  EXPECT_EQ(corpus_from_text("01\n\n10\n"), (std::vector<SymbolSequence>{{0, 1}, {1, 0}}));

  const std::string path = temp_path("corpus.txt");
  write_text(path, "0101\n0101\n");
  const auto tables = load_target(path, 5);
  ASSERT_EQ(tables.size(), 4u);
  EXPECT_DOUBLE_EQ(tables[0].probability({0}), 0.5);
  EXPECT_DOUBLE_EQ(tables[1].probability({1, 0}), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(tables[3].probability({0, 1, 0, 1}), 1.0);

  const std::string dist = temp_path("dist.csv");
  write_text(dist, tables_to_csv(distributions_upto(fixtures::market(), 4)));
  EXPECT_EQ(load_target(dist, 2).size(), 2u);
}

TEST(LearningConfig, AppliesKeysAndRejectsUnknown) {
  Problem p;
  HyperParams hp;
  apply_learning_config(Json::parse(R"({"mu": 12, "g_max": 7, "c_q": 0.5, "gate_set": ["x", "ry"],
                                        "optimizers": ["nm"], "rho0": "ground"})"),
                        p, hp);
  EXPECT_EQ(hp.mu, 12u);
  EXPECT_EQ(hp.g_max, 7u);
  EXPECT_DOUBLE_EQ(p.weights.c_q, 0.5);
  EXPECT_EQ(p.gate_set, (std::vector<GateType>{GateType::X, GateType::RY}));
  EXPECT_EQ(hp.optimizers, (std::vector<std::string>{"nm"}));

  Problem p2;
  HyperParams hp2;
  apply_learning_config(learning_config_json(p, hp), p2, hp2);
  EXPECT_EQ(learning_config_json(p2, hp2), learning_config_json(p, hp));

  EXPECT_THROW(apply_learning_config(Json::parse(R"({"mutation": 0.1})"), p, hp), Error);
  EXPECT_THROW(apply_learning_config(Json::parse(R"({"optimizers": ["powell"]})"), p, hp), Error);
  EXPECT_THROW(apply_learning_config(Json::parse("[1]"), p, hp), Error);
}

TEST(HankelCsv, Layout) {
  const HankelMatrix h =
      hankel([](const SymbolSequence& s) { return std::pow(0.5, static_cast<double>(s.size())); }, 2, 1, 1);
  const std::string csv = hankel_to_csv(h);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "prefix,suffix,value");
  EXPECT_NE(csv.find("e,e,1\n"), std::string::npos);
  EXPECT_NE(csv.find("1,0,0.25\n"), std::string::npos);
}

}  // namespace
}  // namespace qhmm
