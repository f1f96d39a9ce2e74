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

// Serial references against the OpenMP kernels. Arguments are shot counts
// for simulation and population sizes for evolution.

#include <benchmark/benchmark.h>

#include "qhmm/experiments.hpp"
#include "qhmm/model.hpp"

namespace {

using namespace qhmm;

const QhmmUnitary& market_unitary() {
  static const QhmmUnitary q = as_unitary(load_model("builtin:market"));
  return q;
}

void BM_SimulateSerial(benchmark::State& state) {
  const auto shots = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_serial(market_unitary(), 8, shots, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulateParallel(benchmark::State& state) {
  const auto shots = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(market_unitary(), 8, shots, 1, 0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void run_evolve(benchmark::State& state, int threads) {
  const Problem p = market_problem(4);
  HyperParams hp;
  hp.mu = static_cast<std::size_t>(state.range(0));
  hp.lambda = hp.mu;
  hp.g_max = 3;
  hp.n_max = 4;
  hp.target_fitness = 1.0;  // unreachable, so every run does all generations
  hp.threads = threads;
  for (auto _ : state) benchmark::DoNotOptimize(evolve(p, hp));
}

void BM_EvolveSerial(benchmark::State& state) { run_evolve(state, 1); }
void BM_EvolveParallel(benchmark::State& state) { run_evolve(state, 0); }

BENCHMARK(BM_SimulateSerial)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvolveSerial)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvolveParallel)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
