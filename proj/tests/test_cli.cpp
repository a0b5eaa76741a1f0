// Copyright 2026-present the dsidx authors
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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "support.hpp"

namespace dsidx {
namespace {

using nlohmann::json;
using testing::TempDir;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Run run_cli(const TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string(DSIDX_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::vector<json> json_lines(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) {
    if (!l.empty()) out.push_back(json::parse(l));
  }
  return out;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) {
    if (l.empty() || l[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(l);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

class CliFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    data_ = (dir_ / "data.dsix").string();
    queries_ = (dir_ / "queries.dsix").string();
    ASSERT_EQ(run_cli(dir_, "generate --count 4000 --length 64 --seed 3 --out " + data_).code, 0);
    ASSERT_EQ(run_cli(dir_, "generate --count 6 --derive-from " + data_ + " --noise 0.2 --seed 4 --out " + queries_).code, 0);
  }

  std::string common() const { return "--dataset " + data_ + " --queries " + queries_ + " --w 8"; }

  TempDir dir_{"cli"};
  std::string data_, queries_;
};

TEST_F(CliFixture, GenerateReportsAndIsReproducible) {
  const auto r = run_cli(dir_, "generate --count 10 --length 32 --seed 5 --out " + (dir_ / "a.dsix").string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = json::parse(r.out);
  EXPECT_EQ(rep["series"], 10);
  EXPECT_EQ(rep["seed"], 5);
  EXPECT_TRUE(rep.contains("config_hash"));
  EXPECT_EQ(rep["version"], std::string(kVersion));
  run_cli(dir_, "generate --count 10 --length 32 --seed 5 --out " + (dir_ / "b.dsix").string());
  EXPECT_EQ(slurp(dir_ / "a.dsix"), slurp(dir_ / "b.dsix"));
}

TEST_F(CliFixture, QueryAgreesWithOracleForEveryEngine) {
  const auto oracle = run_cli(dir_, "oracle " + common());
  ASSERT_EQ(oracle.code, 0) << oracle.err;
  const auto truth = json_lines(oracle.out);
  ASSERT_EQ(truth.size(), 7u);
  EXPECT_EQ(truth[0]["type"], "config");
  for (const char* engine : {"tree", "flatscan", "batched"}) {
    const auto r = run_cli(dir_, "query --engine " + std::string(engine) + " --workers 2 " + common());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto lines = json_lines(r.out);
    ASSERT_EQ(lines.size(), 7u);
    EXPECT_EQ(lines[0]["config"]["engine"], engine);
    for (std::size_t i = 1; i < lines.size(); ++i) {
      EXPECT_EQ(lines[i]["distance"], truth[i]["distance"]) << engine;
      EXPECT_EQ(lines[i]["id"], truth[i]["id"]);
      EXPECT_TRUE(lines[i]["stats"].contains("real_distances"));
      EXPECT_TRUE(lines[i]["stats"].contains("pruning_ratio"));
      EXPECT_EQ(lines[i]["config_hash"], lines[0]["config_hash"]);
      EXPECT_EQ(lines[i]["seed"], 1);
      EXPECT_EQ(lines[i]["version"], std::string(kVersion));
    }
  }
}

TEST_F(CliFixture, EqualConfigsGiveEqualValues) {
  auto strip = [](std::string s) {
    std::vector<json> lines = json_lines(s);
    for (auto& l : lines) {
      if (l.contains("stats")) l.erase("stats");
    }
    return json(lines).dump();
  };
  const auto a = run_cli(dir_, "query --engine batched " + common());
  const auto b = run_cli(dir_, "query --engine batched " + common());
  EXPECT_EQ(strip(a.out), strip(b.out));
  const auto c = run_cli(dir_, "query --engine batched --leaf-capacity 50 " + common());
  EXPECT_NE(json_lines(a.out)[0]["config_hash"], json_lines(c.out)[0]["config_hash"]);
}

TEST_F(CliFixture, BuildThenQueryFromIndexFile) {
  const auto idx = (dir_ / "i.dsxt").string();
  for (const char* chunk : {"0", "500"}) {
    const auto b = run_cli(dir_, "build --dataset " + data_ + " --out " + idx + " --w 8 --leaf-capacity 100 --chunk " + chunk);
    ASSERT_EQ(b.code, 0) << b.err;
    const auto rep = json::parse(b.out);
    EXPECT_EQ(rep["series"], 4000);
    EXPECT_GT(rep["leaves"].get<int>(), 1);
    const auto q = run_cli(dir_, "query --index " + idx + " " + common());
    ASSERT_EQ(q.code, 0) << q.err;
    const auto truth = json_lines(run_cli(dir_, "oracle " + common()).out);
    const auto lines = json_lines(q.out);
    for (std::size_t i = 1; i < lines.size(); ++i) EXPECT_EQ(lines[i]["distance"], truth[i]["distance"]);
  }
}

TEST_F(CliFixture, BenchRowsPerEngineAndQuery) {
  const auto r = run_cli(dir_, "bench --engines all " + common());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# dsidx"), std::string::npos);
  EXPECT_NE(r.out.find("config_hash="), std::string::npos);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 1u + 3 * 6);
  EXPECT_EQ(rows[0][0], "engine");
  std::map<std::string, std::set<std::string>> distances;  // query -> distinct distances
  std::map<std::string, int> per_engine;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ++per_engine[rows[i][0]];
    distances[rows[i][1]].insert(rows[i][3]);
  }
  EXPECT_EQ(per_engine["tree"], 6);
  EXPECT_EQ(per_engine["flatscan"], 6);
  EXPECT_EQ(per_engine["batched"], 6);
  for (const auto& [q, d] : distances) EXPECT_EQ(d.size(), 1u) << "query " << q;
}

TEST_F(CliFixture, CsvOutputToFile) {
  const auto path = (dir_ / "out.csv").string();
  const auto r = run_cli(dir_, "oracle --format csv --out " + path + " " + common());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto rows = csv_rows(slurp(path));
  EXPECT_EQ(rows.size(), 7u);
}

TEST_F(CliFixture, UsageErrorsExitOne) {
  auto r = run_cli(dir_, "query --engine warp " + common());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--engine"), std::string::npos) << r.err;
  EXPECT_EQ(run_cli(dir_, "").code, 1);
  EXPECT_EQ(run_cli(dir_, "frobnicate").code, 1);
  EXPECT_EQ(run_cli(dir_, "query --dataset " + data_).code, 1);
  EXPECT_EQ(run_cli(dir_, "bench --engines tree,warp " + common()).code, 1);
  EXPECT_EQ(run_cli(dir_, "query --format xml " + common()).code, 1);
  EXPECT_EQ(run_cli(dir_, "--help").code, 0);
}

TEST_F(CliFixture, DataErrorsExitTwo) {
  std::ofstream(dir_ / "junk.dsix") << "not a dataset at all, clearly";
  const auto r = run_cli(dir_, "oracle --dataset " + (dir_ / "junk.dsix").string() + " --queries " + queries_);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("magic"), std::string::npos) << r.err;
  EXPECT_EQ(run_cli(dir_, "oracle --dataset " + (dir_ / "none.dsix").string() + " --queries " + queries_).code, 2);
  // Query length differs from the dataset's.
  const auto other = (dir_ / "other.dsix").string();
  run_cli(dir_, "generate --count 2 --length 32 --out " + other);
  EXPECT_EQ(run_cli(dir_, "query --dataset " + data_ + " --queries " + other + " --w 8").code, 2);
}

TEST_F(CliFixture, InvariantViolationExitsThree) {
  const auto ds = io::load_dataset(data_);
  SummaryParams p;
  p.length = 64;
  p.segments = 8;
  const auto tree = build(ds, p, {1, 100});
  Node* node = tree.root_children()[0].node.get();
  while (!node->is_leaf()) node = node->children[0].get();
  node->words[0] ^= 0x80;
  const auto idx = (dir_ / "bad.dsxt").string();
  io::save_index(idx, tree);
  const auto r = run_cli(dir_, "query --index " + idx + " " + common());
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("path containment"), std::string::npos) << r.err;
}

TEST_F(CliFixture, SimulationOutputs) {
  const auto cfg = dir_ / "s.cfg";
  std::ofstream(cfg) << "# four nodes\nnodes=4\npartitions=8\nreplication=1\npolicy=greedy_lpt\njobs=30\nseed=2\n";
  const auto r = run_cli(dir_, "sim --config " + cfg.string() + " --set sigma=0.3 --set steal=true");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = json_lines(r.out);
  ASSERT_EQ(lines.size(), 1u + 30 + 1);
  EXPECT_EQ(lines[0]["scenario"]["sigma"], "0.3");
  EXPECT_EQ(lines[0]["scenario"]["nodes"], "4");
  EXPECT_EQ(lines.back()["type"], "summary");

  const auto csv = run_cli(dir_, "sim --config " + cfg.string() + " --format csv");
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(csv_rows(csv.out).size(), 31u);
  EXPECT_NE(csv.out.find("# makespan="), std::string::npos);

  const auto again = run_cli(dir_, "sim --config " + cfg.string() + " --format csv");
  EXPECT_EQ(again.out, csv.out);

  EXPECT_EQ(run_cli(dir_, "sim --set colour=red").code, 2);
  EXPECT_EQ(run_cli(dir_, "sim --set replication=4").code, 2);
}

TEST_F(CliFixture, MeasuredSimulation) {
  const auto r = run_cli(dir_, "sim --dataset " + data_ + " --w 8 --set mode=measured --set partitions=4 --set nodes=2 "
                                "--set queries=5 --set leaf_capacity=200");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = json_lines(r.out);
  ASSERT_EQ(lines.size(), 1u + 20 + 1);
  EXPECT_TRUE(lines[0].contains("cost_model"));
}

}  // namespace
}  // namespace dsidx
