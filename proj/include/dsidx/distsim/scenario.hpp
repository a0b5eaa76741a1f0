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

#pragma once

#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dsidx/distsim/job.hpp"
#include "dsidx/distsim/partition.hpp"
#include "dsidx/distsim/schedule.hpp"
#include "dsidx/distsim/simulator.hpp"
#include "dsidx/error.hpp"

namespace dsidx::distsim {

/// Simulation scenario as read from a key=value file.
struct Scenario {
  std::size_t nodes = 4;
  std::size_t partitions = 8;
  std::size_t replication = 1;
  Policy policy = Policy::kGreedyLpt;
  SimMode mode = SimMode::kSynthetic;
  std::uint64_t seed = 1;
  double sigma = 0.0;
  double beta = 0.0;
  double latency = 0.0;
  ReplicaBuild replica_build = ReplicaBuild::kEager;
  bool steal = true;

  // Synthetic batches.
  std::size_t jobs = 64;
  double cost_min = 1.0;
  double skew = 10.0;
  std::size_t dataset_size = 1000000;

  // Measured batches.
  std::size_t queries = 16;
  std::size_t warmup = 10;
  std::size_t workers = 1;
  std::size_t leaf_capacity = 2000;
  double query_noise = 0.1;

  SimConfig sim_config() const {
    SimConfig c;
    c.mode = mode;
    c.steal = steal;
    c.seed = seed;
    c.sigma = sigma;
    c.steal_latency = latency;
    c.replica_build = replica_build;
    c.rebuild_beta = beta;
    return c;
  }

  /// Fully resolved configuration, one key=value per line in key order.
  std::string to_config_string() const {
    std::map<std::string, std::string> kv;
    auto num = [](auto v) {  // shortest form that parses back to v
      char buf[32];
      const auto r = std::to_chars(buf, buf + sizeof buf, v);
      return std::string(buf, r.ptr);
    };
    kv["nodes"] = num(nodes);
    kv["partitions"] = num(partitions);
    kv["replication"] = num(replication);
    kv["policy"] = std::string(to_string(policy));
    kv["mode"] = mode == SimMode::kSynthetic ? "synthetic" : "measured";
    kv["seed"] = num(seed);
    kv["sigma"] = num(sigma);
    kv["beta"] = num(beta);
    kv["latency"] = num(latency);
    kv["replica_build"] = replica_build == ReplicaBuild::kEager ? "eager" : "lazy";
    kv["steal"] = steal ? "true" : "false";
    kv["jobs"] = num(jobs);
    kv["cost_min"] = num(cost_min);
    kv["skew"] = num(skew);
    kv["dataset_size"] = num(dataset_size);
    kv["queries"] = num(queries);
    kv["warmup"] = num(warmup);
    kv["workers"] = num(workers);
    kv["leaf_capacity"] = num(leaf_capacity);
    kv["query_noise"] = num(query_noise);
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view key, std::string_view value, std::size_t line) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw InputError("line " + std::to_string(line) + ": bad value '" + std::string(value) +
                     "' for " + std::string(key));
  }
  return out;
}

inline bool parse_bool(std::string_view key, std::string_view value, std::size_t line) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw InputError("line " + std::to_string(line) + ": bad boolean '" + std::string(value) +
                   "' for " + std::string(key));
}

}  // namespace detail

/// Parses key=value lines. Blank lines and lines starting with '#' are
/// ignored; unknown keys are errors.
inline Scenario parse_scenario(std::string_view text, Scenario s = {}) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    using detail::parse_number;
    if (key == "nodes") s.nodes = parse_number<std::size_t>(key, value, line_no);
    else if (key == "partitions") s.partitions = parse_number<std::size_t>(key, value, line_no);
    else if (key == "replication") s.replication = parse_number<std::size_t>(key, value, line_no);
    else if (key == "policy") s.policy = parse_policy(value);
    else if (key == "mode") {
      if (value == "synthetic") s.mode = SimMode::kSynthetic;
      else if (value == "measured") s.mode = SimMode::kMeasured;
      else throw InputError("line " + std::to_string(line_no) + ": mode must be synthetic or measured");
    } else if (key == "seed") s.seed = parse_number<std::uint64_t>(key, value, line_no);
    else if (key == "sigma") s.sigma = parse_number<double>(key, value, line_no);
    else if (key == "beta") s.beta = parse_number<double>(key, value, line_no);
    else if (key == "latency") s.latency = parse_number<double>(key, value, line_no);
    else if (key == "replica_build") {
      if (value == "eager") s.replica_build = ReplicaBuild::kEager;
      else if (value == "lazy") s.replica_build = ReplicaBuild::kLazy;
      else throw InputError("line " + std::to_string(line_no) + ": replica_build must be eager or lazy");
    } else if (key == "steal") s.steal = detail::parse_bool(key, value, line_no);
    else if (key == "jobs") s.jobs = parse_number<std::size_t>(key, value, line_no);
    else if (key == "cost_min") s.cost_min = parse_number<double>(key, value, line_no);
    else if (key == "skew") s.skew = parse_number<double>(key, value, line_no);
    else if (key == "dataset_size") s.dataset_size = parse_number<std::size_t>(key, value, line_no);
    else if (key == "queries") s.queries = parse_number<std::size_t>(key, value, line_no);
    else if (key == "warmup") s.warmup = parse_number<std::size_t>(key, value, line_no);
    else if (key == "workers") s.workers = parse_number<std::size_t>(key, value, line_no);
    else if (key == "leaf_capacity") s.leaf_capacity = parse_number<std::size_t>(key, value, line_no);
    else if (key == "query_noise") s.query_noise = parse_number<double>(key, value, line_no);
    else throw InputError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
  }
  if (s.sigma < 0 || s.beta < 0 || s.latency < 0 || s.cost_min <= 0 || s.skew < 1) {
    throw InputError("sigma, beta and latency must be >= 0, cost_min > 0 and skew >= 1");
  }
  return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

/// Synthetic batch: uniform target partitions, log-uniform costs in
/// [cost_min, cost_min * skew]. The initial BSF is set proportional to the
/// cost so that calibration has a signal to find.
inline std::vector<QueryJob> synthetic_batch(const Scenario& s, const PartitionMap& map) {
  std::mt19937_64 rng(s.seed ^ 0x6a09e667f3bcc908ull);
  std::vector<QueryJob> jobs(s.jobs);
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    auto& job = jobs[j];
    job.query_id = j;
    job.partition = static_cast<std::size_t>(rng() % map.partitions.size());
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    job.predicted_cost = s.cost_min * std::pow(s.skew, u);
    job.initial_bsf = job.predicted_cost / s.cost_min;
    job.partition_size = static_cast<double>(map.partitions[job.partition].count);
  }
  return jobs;
}

}  // namespace dsidx::distsim
