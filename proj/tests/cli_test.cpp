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

// Drives the built qhmm binary through std::system.

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "qhmm/io.hpp"
#include "qhmm/version.hpp"

namespace qhmm {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "qhmm_cli_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(QHMM_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, VersionFlag) {
  const fs::path dir = scratch("version");
  ASSERT_EQ(run("--version", dir / "log"), 0);
  EXPECT_NE(read_text((dir / "log").string()).find(kVersion), std::string::npos);
}

TEST(Cli, SimulateIsByteIdenticalForASeed) {
  const fs::path a = scratch("sim_a"), b = scratch("sim_b");
  const std::string args = " simulate --model builtin:amplitude_damping -t 3 --shots 500";
  ASSERT_EQ(run("--seed 7 --threads 1 --out " + a.string() + args, a / "log"), 0);
  ASSERT_EQ(run("--seed 7 --threads 2 --out " + b.string() + args, b / "log"), 0);
  EXPECT_EQ(read_text((a / "sequences.csv").string()), read_text((b / "sequences.csv").string()));
  EXPECT_EQ(read_text((a / "empirical.csv").string()), read_text((b / "empirical.csv").string()));
  const auto corpus = read_text((a / "sequences.csv").string());
  EXPECT_EQ(std::count(corpus.begin(), corpus.end(), '\n'), 501);
}

TEST(Cli, DistributionMatchesLibrary) {
  const fs::path dir = scratch("dist");
  ASSERT_EQ(run("--out " + dir.string() + " distribution --model builtin:market -t 2", dir / "log"), 0);
  const std::string text = read_text((dir / "distribution.csv").string());
  const DistributionTable expect = distribution(fixtures::market(), 2);
  std::string rows = "sequence,probability\n";
  for (std::size_t i = 0; i < expect.size(); ++i)
    rows += format_sequence(expect.sequence_at(i)) + "," + format_double(expect[i]) + "\n";
  EXPECT_EQ(text, rows);
}

TEST(Cli, HankelRankReport) {
  const fs::path dir = scratch("hankel");
  ASSERT_EQ(run("--out " + dir.string() + " hankel --model builtin:market --max-prefix 2 --max-suffix 2",
                dir / "log"),
            0);
  const Json j = Json::parse(read_text((dir / "rank.json").string()));
  EXPECT_EQ(j["rank"], 4);
  EXPECT_EQ(j["quantum_dim"], 2);
}

TEST(Cli, QuantizeWritesAKrausModel) {
  const fs::path dir = scratch("quantize");
  ASSERT_EQ(run("--out " + dir.string() + " quantize --model builtin:market", dir / "log"), 0);
  const LoadedModel m = load_model((dir / "qhmm.json").string());
  ASSERT_TRUE(m.kraus);
  const auto d = distributions_upto(*m.kraus, 3);
  const auto c = distributions_upto(fixtures::market(), 3);
  EXPECT_LT(divergence_avg(d, c), 1e-12);
}

TEST(Cli, LearnEvoIsRepeatable) {
  const fs::path a = scratch("evo_a"), b = scratch("evo_b");
  const fs::path cfg = scratch("evo_cfg") / "config.json";
  write_text(cfg.string(), R"({"mu": 8, "g_max": 3, "optimizer_budget": 40})");
  const std::string args = " --config " + cfg.string() + " learn-evo --target builtin:market -n 3";
  ASSERT_EQ(run("--seed 3 --out " + a.string() + args, a / "log"), 0);
  ASSERT_EQ(run("--seed 3 --out " + b.string() + args, b / "log"), 0);
  for (const char* f : {"report.json", "best_model.json", "fitness_trace.csv"})
    EXPECT_EQ(read_text((a / f).string()), read_text((b / f).string())) << f;
  EXPECT_NO_THROW(load_model((a / "best_model.json").string()));
}

TEST(Cli, LandscapeTakesSeveralRates) {
  const fs::path dir = scratch("landscape");
  ASSERT_EQ(run("--seed 2 --out " + dir.string() + " landscape --model builtin:market --steps 40 --rates 0.1,0.3",
                dir / "log"),
            0);
  const Json j = Json::parse(read_text((dir / "correlation.json").string()));
  ASSERT_EQ(j["walks"].size(), 2u);
  EXPECT_EQ(j["walks"][1]["rate"], 0.3);
  EXPECT_TRUE(j["walks"][0]["smoothness_bound_holds"].get<bool>());
  EXPECT_TRUE(fs::exists(dir / "landscape_rate1_bins.csv"));
}

TEST(Cli, ErrorsExitNonzero) {
  const fs::path dir = scratch("errors");
  EXPECT_NE(run("--out " + dir.string() + " distribution --model " + (dir / "missing.json").string(), dir / "log"), 0);
  EXPECT_NE(read_text((dir / "log").string()).find("qhmm: error:"), std::string::npos);
  EXPECT_NE(run("distribution", dir / "log"), 0);
  EXPECT_NE(run("no-such-command", dir / "log"), 0);

  const fs::path cfg = dir / "bad.json";
  write_text(cfg.string(), R"({"mutation_rate": 0.2})");
  EXPECT_NE(run("--seed 1 --out " + dir.string() + " --config " + cfg.string() +
                    " learn-evo --target builtin:market",
                dir / "log"),
            0);
}

}  // namespace
}  // namespace qhmm
