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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qhmm/channel.hpp"
#include "qhmm/circuit.hpp"
#include "qhmm/classical.hpp"
#include "qhmm/language.hpp"
#include "qhmm/learning.hpp"
#include "qhmm/model.hpp"

namespace qhmm {

using Json = nlohmann::ordered_json;

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);
/// Shortest text that round-trips the double ("%.17g").
std::string format_double(double v);
/// Two-space indented JSON with a trailing newline.
std::string dump(const Json& j);

Json to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

Json to_json(const KrausChannel& ch);
KrausChannel channel_from_json(const Json& j);

/// "A" and "B" are written as per-state rows: A[i][j] = P(j | i), B[i][a] = P(a | i).
Json to_json(const ClassicalHmm& h);
ClassicalHmm classical_from_json(const Json& j);

/// Angles are written inline, so slot structure is not preserved.
Json to_json(const Circuit& c);
Circuit circuit_from_json(const Json& j);

Json to_json(const QhmmKraus& q);
Json to_json(const QhmmUnitary& q);
Json to_json(const Hypothesis& h, std::size_t alphabet_size);

/// Any model a command can read. Exactly one of the forms is set.
struct LoadedModel {
  std::string kind;  // kraus, unitary, classical, circuit
  std::optional<QhmmKraus> kraus;
  std::optional<QhmmUnitary> unitary;
  std::optional<ClassicalHmm> classical;
  std::optional<Hypothesis> hypothesis;
  std::size_t alphabet_size = 0;  // for circuit hypotheses
};

LoadedModel model_from_json(const Json& j);
/// A file path, or one of builtin:market, builtin:gaussian4,
/// builtin:amplitude_damping, builtin:monras.
LoadedModel load_model(const std::string& spec);
const std::vector<std::string>& builtin_models();

/// Operator-sum form of any model (classical models are quantized).
QhmmKraus as_kraus(const LoadedModel& m);
/// Unitary form of any model; Kraus models are dilated with one emission
/// outcome per operator.
QhmmUnitary as_unitary(const LoadedModel& m);
/// Exact tables for lengths 1..n.
std::vector<DistributionTable> model_distributions(const LoadedModel& m, std::size_t n);

/// `sequence,probability` lines, shortest sequences first.
std::string tables_to_csv(const std::vector<DistributionTable>& tables);
std::string table_to_csv(const DistributionTable& table);
/// Parses `sequence,probability` CSV. Lengths must be contiguous from 1 and
/// unlisted sequences get probability 0. alphabet_size 0 infers it.
std::vector<DistributionTable> tables_from_csv(const std::string& text,
                                               std::size_t alphabet_size = 0);

/// One sequence per line; blank lines are skipped.
std::vector<SymbolSequence> corpus_from_text(const std::string& text);
std::string corpus_to_text(const std::vector<SymbolSequence>& corpus);

/// Learning target from a model spec, a distribution CSV, or a corpus file.
/// Tables cover lengths 1..n (fewer if a CSV stops earlier).
std::vector<DistributionTable> load_target(const std::string& spec, std::size_t n,
                                           std::size_t alphabet_size = 0);

/// Applies the keys of a learning config object; unknown keys throw.
void apply_learning_config(const Json& j, Problem& p, HyperParams& hp);
Json learning_config_json(const Problem& p, const HyperParams& hp);

Json to_json(const LearningReport& r, std::size_t alphabet_size);
/// generation,best_fitness,mean_fitness,best_divergence,temperature,accepted_inferior,improved_children
std::string fitness_trace_csv(const LearningReport& r);

/// prefix,suffix,value rows; the empty sequence is written as "e".
std::string hankel_to_csv(const HankelMatrix& h);

}  // namespace qhmm
