/*
 * Copyright 2026 The d2g2 Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "test_support.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;
using namespace d2g2;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("d2g2_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(D2G2_CLI_PATH) + " " + args + " >" + path("stdout.txt") + " 2>" +
                            path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void train_small(const std::string& data, const std::string& ckpt) const {
    std::ofstream(path("small.cfg")) << "epochs = 2\nbatch_size = 2\nd_f = 3\nd_z = 2\nh = 4\nL = 1\nseed = 1\n";
    ASSERT_EQ(run("train --data " + data + " --config " + path("small.cfg") + " --out " + ckpt + " --quiet"), 0)
        << slurp(path("stderr.txt"));
  }

  fs::path dir_;
};

TEST_F(Cli, SynthBaDataset) {
  ASSERT_EQ(run("synth --model ba --nodes 100 --snapshots 10 --graphs 300 --seed 0 --out " + path("ba.jsonl")), 0)
      << slurp(path("stderr.txt"));
  const auto ds = read_dataset(path("ba.jsonl"));
  EXPECT_EQ(ds.size(), 300u);
  EXPECT_EQ(ds.n_max, 100u);
  EXPECT_EQ(ds.T, 10u);
  EXPECT_EQ(ds.c, 1u);
  for (const auto& g : ds.graphs) EXPECT_TRUE(validate(g).empty());
}

TEST_F(Cli, EvalOfIdenticalSetsIsZero) {
  ASSERT_EQ(run("synth --model ba --nodes 30 --snapshots 4 --graphs 12 --seed 3 --out " + path("a.jsonl")), 0);
  ASSERT_EQ(run("eval --real " + path("a.jsonl") + " --gen " + path("a.jsonl") + " --out " + path("rep.json")), 0)
      << slurp(path("stderr.txt"));
  const auto rep = nlohmann::json::parse(slurp(path("rep.json")));
  ASSERT_TRUE(rep.contains("mmd"));
  std::size_t defined = 0;
  for (auto it = rep["mmd"].begin(); it != rep["mmd"].end(); ++it) {
    if (it.value().is_null()) continue;
    ++defined;
    EXPECT_NEAR(it.value().get<double>(), 0.0, 1e-12) << it.key();
  }
  EXPECT_GT(defined, 0u);
  EXPECT_NEAR(rep["node_attributes"]["mse"].get<double>(), 0.0, 1e-12);
  EXPECT_FALSE(slurp(path("stdout.txt")).empty());
}

TEST_F(Cli, TrainGenerateProbePlotPipeline) {
  ASSERT_EQ(run("synth --model toy --nodes 6 --snapshots 4 --graphs 4 --seed 2 --out " + path("toy.jsonl")), 0);
  EXPECT_TRUE(fs::exists(path("toy.jsonl.labels.jsonl")));
  train_small(path("toy.jsonl"), path("m.ckpt"));
  EXPECT_TRUE(fs::exists(path("m.ckpt.report.jsonl")));

  ASSERT_EQ(run("generate --ckpt " + path("m.ckpt") + " --num 5 --seed 9 --out " + path("g1.jsonl")), 0);
  ASSERT_EQ(run("generate --ckpt " + path("m.ckpt") + " --num 5 --seed 9 --out " + path("g2.jsonl")), 0);
  EXPECT_EQ(slurp(path("g1.jsonl")), slurp(path("g2.jsonl")));
  const auto gen = read_dataset(path("g1.jsonl"));
  EXPECT_EQ(gen.size(), 5u);
  EXPECT_EQ(gen.n_max, 6u);

  ASSERT_EQ(run("probe --ckpt " + path("m.ckpt") + " --factor z_node --samples 3 --out " + path("probe.json")), 0)
      << slurp(path("stderr.txt"));
  const auto probe = nlohmann::json::parse(slurp(path("probe.json")));
  EXPECT_EQ(probe["varied_factor"], "z_node");
  EXPECT_EQ(probe["edge_variation"].get<double>(), 0.0);
  EXPECT_TRUE(fs::exists(path("probe.json.graphs.jsonl")));

  ASSERT_EQ(run("plot --in " + path("g1.jsonl") + " --out " + path("g.svg")), 0);
  EXPECT_EQ(slurp(path("g.svg")).rfind("<svg", 0), 0u);
  ASSERT_EQ(run("plot --style table --in " + path("probe.json") + " --out " + path("t.svg")), 0);
  EXPECT_NE(slurp(path("t.svg")).find("z_node"), std::string::npos);
}

TEST_F(Cli, BenchWritesTable) {
  ASSERT_EQ(run("bench --sizes 10,20 --snapshots 2 --reps 1 --out " + path("bench.tsv")), 0);
  std::istringstream in(slurp(path("bench.tsv")));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "n\tT\tmedian_seconds\tlog10_seconds");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2u);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("synth"), 2);
  EXPECT_EQ(run("train --data /nonexistent --out " + path("x")), 2);
  EXPECT_EQ(run("bench --sizes 10,abc"), 2);
  std::ofstream(path("bad.jsonl")) << "{not json\n";
  EXPECT_EQ(run("eval --real " + path("bad.jsonl") + " --gen " + path("bad.jsonl") + " --out " + path("r.json")), 1);
  EXPECT_FALSE(slurp(path("stderr.txt")).empty());
  std::ofstream(path("bad.cfg")) << "nonsense_key = 1\n";
  ASSERT_EQ(run("synth --model toy --nodes 5 --snapshots 3 --graphs 2 --out " + path("t.jsonl")), 0);
  EXPECT_EQ(run("train --data " + path("t.jsonl") + " --config " + path("bad.cfg") + " --out " + path("m")), 2);
  EXPECT_EQ(run("--help"), 0);
}

}  // namespace
