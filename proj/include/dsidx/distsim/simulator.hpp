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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <numeric>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dsidx/distsim/job.hpp"
#include "dsidx/distsim/partition.hpp"
#include "dsidx/distsim/schedule.hpp"
#include "dsidx/error.hpp"
#include "dsidx/io/random_walk.hpp"

namespace dsidx::distsim {

enum class SimMode { kSynthetic, kMeasured };
enum class ReplicaBuild { kEager, kLazy };

struct SimConfig {
  SimMode mode = SimMode::kSynthetic;
  bool steal = true;
  std::uint64_t seed = 1;
  // Lognormal noise on synthetic durations; 0 makes them equal to the
  // predictions.
  double sigma = 0.0;
  double steal_latency = 0.0;
  ReplicaBuild replica_build = ReplicaBuild::kEager;
  // Lazy replicas: first use of a partition on a non-primary node costs
  // beta * partition size.
  double rebuild_beta = 0.0;
};

struct JobRecord {
  std::size_t job = 0;
  std::size_t query_id = 0;
  std::size_t partition = 0;
  NodeId node = 0;
  double start = 0.0;
  double end = 0.0;
  double overhead = 0.0;
  bool stolen = false;
};

struct SimMetrics {
  std::vector<double> busy;
  double makespan = 0.0;
  std::size_t steals = 0;
  double stolen_fraction = 0.0;
  double rebuild_time = 0.0;
  double imbalance = 1.0;
  std::vector<JobRecord> log;
};

/// Execution time of a job, independent of the node that runs it.
inline double job_duration(const QueryJob& job, std::size_t index, const SimConfig& config) {
  if (config.mode == SimMode::kMeasured) {
    if (!job.measured_cost) {
      throw InputError("measured simulation needs a measured cost for job " + std::to_string(index));
    }
    return *job.measured_cost;
  }
  if (config.sigma == 0.0) return job.predicted_cost;
  io::NormalStream z(io::series_seed(config.seed, index));
  return job.predicted_cost * std::exp(config.sigma * z.next());
}

/// Discrete-event run of the scheduled batch, one executor per node.
///
/// Nodes run their queues in order. With stealing on, an idle node looks at
/// victims in decreasing order of remaining predicted work and takes the
/// largest pending job whose partition it holds, provided it would finish
/// that job (including latency and any rebuild) before the victim's
/// projected completion of it. Only jobs move between nodes, never data:
/// every execution happens on a holder of the job's partition.
inline SimMetrics run_simulation(std::span<const QueryJob> jobs, const PartitionMap& map,
                                 const Schedule& sched, const SimConfig& config) {
  const std::size_t nodes = map.nodes;
  if (sched.queues.size() != nodes) throw InputError("schedule does not match node count");

  struct NodeState {
    std::deque<std::size_t> pending;
    bool running = false;
    double predicted_end = 0.0;
    std::set<std::size_t> built;
  };
  std::vector<NodeState> state(nodes);
  for (NodeId n = 0; n < nodes; ++n) {
    for (std::size_t j : sched.queues[n]) {
      if (!map.holds(n, jobs[j].partition)) {
        throw InvariantError("locality: job " + std::to_string(j) + " scheduled on node " +
                             std::to_string(n) + " which does not hold partition " +
                             std::to_string(jobs[j].partition));
      }
      state[n].pending.push_back(j);
    }
  }

  std::vector<double> duration(jobs.size());
  for (std::size_t j = 0; j < jobs.size(); ++j) duration[j] = job_duration(jobs[j], j, config);

  auto rebuild_cost = [&](NodeId n, std::size_t partition, const std::set<std::size_t>& built) {
    if (config.replica_build != ReplicaBuild::kLazy) return 0.0;
    const auto& part = map.partitions[partition];
    if (part.primary == n || built.count(partition)) return 0.0;
    return config.rebuild_beta * static_cast<double>(part.count);
  };

  SimMetrics m;
  m.busy.assign(nodes, 0.0);
  using Event = std::pair<double, NodeId>;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;

  auto start = [&](NodeId n, std::size_t j, double now, bool stolen) {
    auto& st = state[n];
    const double rebuild = rebuild_cost(n, jobs[j].partition, st.built);
    const double overhead = rebuild + (stolen ? config.steal_latency : 0.0);
    st.built.insert(jobs[j].partition);
    const double end = now + overhead + duration[j];
    st.running = true;
    st.predicted_end = now + overhead + jobs[j].predicted_cost;
    m.log.push_back({j, jobs[j].query_id, jobs[j].partition, n, now, end, overhead, stolen});
    m.busy[n] += end - now;
    m.rebuild_time += rebuild;
    if (stolen) ++m.steals;
    events.emplace(end, n);
  };

  // Remaining predicted work of a node, and the projected finish time of
  // each of its pending jobs.
  auto projection = [&](NodeId n, double now, std::vector<double>* finish) {
    const auto& st = state[n];
    double t = st.running ? std::max(st.predicted_end, now) : now;
    std::set<std::size_t> built = st.built;
    if (finish) finish->clear();
    for (std::size_t j : st.pending) {
      t += rebuild_cost(n, jobs[j].partition, built) + jobs[j].predicted_cost;
      built.insert(jobs[j].partition);
      if (finish) finish->push_back(t);
    }
    return t - now;
  };

  auto try_steal = [&](NodeId thief, double now) {
    std::vector<NodeId> victims;
    std::vector<double> load(nodes, 0.0);
    for (NodeId v = 0; v < nodes; ++v) {
      if (v == thief || state[v].pending.empty()) continue;
      load[v] = projection(v, now, nullptr);
      victims.push_back(v);
    }
    std::stable_sort(victims.begin(), victims.end(),
                     [&](NodeId a, NodeId b) { return load[a] > load[b]; });
    std::vector<double> finish;
    for (NodeId v : victims) {
      projection(v, now, &finish);
      auto& pending = state[v].pending;
      std::vector<std::size_t> positions;
      for (std::size_t pos = 0; pos < pending.size(); ++pos) {
        if (map.holds(thief, jobs[pending[pos]].partition)) positions.push_back(pos);
      }
      std::stable_sort(positions.begin(), positions.end(), [&](std::size_t a, std::size_t b) {
        const double ca = jobs[pending[a]].predicted_cost;
        const double cb = jobs[pending[b]].predicted_cost;
        return ca != cb ? ca > cb : a > b;
      });
      for (std::size_t pos : positions) {
        const std::size_t j = pending[pos];
        const double thief_finish = now + config.steal_latency +
                                    rebuild_cost(thief, jobs[j].partition, state[thief].built) +
                                    jobs[j].predicted_cost;
        if (thief_finish < finish[pos]) {
          pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pos));
          start(thief, j, now, true);
          return true;
        }
      }
    }
    return false;
  };

  auto dispatch = [&](NodeId n, double now) {
    auto& st = state[n];
    if (st.running) return;
    if (!st.pending.empty()) {
      const std::size_t j = st.pending.front();
      st.pending.pop_front();
      start(n, j, now, false);
    } else if (config.steal) {
      try_steal(n, now);
    }
  };

  for (NodeId n = 0; n < nodes; ++n) dispatch(n, 0.0);
  while (!events.empty()) {
    const auto [now, n] = events.top();
    events.pop();
    state[n].running = false;
    m.makespan = std::max(m.makespan, now);
    dispatch(n, now);
    if (config.steal) {
      for (NodeId other = 0; other < nodes; ++other) dispatch(other, now);
    }
  }

  for (const auto& st : state) {
    if (!st.pending.empty()) throw InvariantError("simulation ended with pending jobs");
  }
  double total = 0.0, stolen = 0.0;
  for (const auto& r : m.log) {
    total += r.end - r.start;
    if (r.stolen) stolen += r.end - r.start;
  }
  m.stolen_fraction = total > 0.0 ? stolen / total : 0.0;
  const double mean = std::accumulate(m.busy.begin(), m.busy.end(), 0.0) / static_cast<double>(nodes);
  m.imbalance = mean > 0.0 ? *std::max_element(m.busy.begin(), m.busy.end()) / mean : 1.0;
  return m;
}

/// Locality and exactly-once audit of an event log. Returns an empty string
/// when both hold, otherwise a description of the first violation.
inline std::string audit_log(const SimMetrics& m, std::span<const QueryJob> jobs,
                             const PartitionMap& map) {
  std::vector<std::size_t> runs(jobs.size(), 0);
  for (const auto& r : m.log) {
    if (r.job >= jobs.size()) return "log references unknown job " + std::to_string(r.job);
    if (!map.holds(r.node, jobs[r.job].partition)) {
      return "locality: job " + std::to_string(r.job) + " ran on node " + std::to_string(r.node) +
             " which does not hold partition " + std::to_string(jobs[r.job].partition);
    }
    ++runs[r.job];
  }
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (runs[j] != 1) {
      return "exactly-once: job " + std::to_string(j) + " ran " + std::to_string(runs[j]) + " times";
    }
  }
  return {};
}

}  // namespace dsidx::distsim
