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
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dsidx/distsim/job.hpp"
#include "dsidx/distsim/partition.hpp"
#include "dsidx/error.hpp"

namespace dsidx::distsim {

enum class Policy { kRoundRobin, kGreedyLpt };

inline std::string_view to_string(Policy p) {
  return p == Policy::kRoundRobin ? "round_robin" : "greedy_lpt";
}

inline Policy parse_policy(std::string_view s) {
  if (s == "round_robin") return Policy::kRoundRobin;
  if (s == "greedy_lpt") return Policy::kGreedyLpt;
  throw InputError("unknown scheduling policy '" + std::string(s) +
                   "' (expected round_robin or greedy_lpt)");
}

/// Per-node ordered job queues (indices into the job batch).
struct Schedule {
  std::vector<std::vector<std::size_t>> queues;
  std::vector<double> predicted_load;
};

/// Assigns every job to a holder of its partition.
///
/// round_robin: jobs in batch order; a global cursor walks the nodes and each
/// job goes to the first holder at or after the cursor.
/// greedy_lpt: jobs by decreasing predicted cost onto the least-loaded holder
/// (lowest node id on ties).
inline Schedule schedule(std::span<const QueryJob> jobs, const PartitionMap& map, Policy policy) {
  Schedule s;
  s.queues.resize(map.nodes);
  s.predicted_load.assign(map.nodes, 0.0);
  for (const auto& j : jobs) {
    if (j.partition >= map.partitions.size()) {
      throw InputError("job targets partition " + std::to_string(j.partition) + " of " +
                       std::to_string(map.partitions.size()));
    }
  }
  auto place = [&](std::size_t job, NodeId node) {
    s.queues[node].push_back(job);
    s.predicted_load[node] += jobs[job].predicted_cost;
  };

  if (policy == Policy::kRoundRobin) {
    NodeId cursor = 0;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      const auto& part = map.partitions[jobs[j].partition];
      for (std::size_t step = 0; step < map.nodes; ++step) {
        const NodeId n = (cursor + step) % map.nodes;
        if (part.held_by(n)) {
          place(j, n);
          cursor = (n + 1) % map.nodes;
          break;
        }
      }
    }
    return s;
  }

  std::vector<std::size_t> order(jobs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return jobs[a].predicted_cost > jobs[b].predicted_cost;
  });
  for (std::size_t j : order) {
    const auto& part = map.partitions[jobs[j].partition];
    NodeId best = part.primary;
    for (NodeId n : part.holders()) {
      if (s.predicted_load[n] < s.predicted_load[best] ||
          (s.predicted_load[n] == s.predicted_load[best] && n < best)) {
        best = n;
      }
    }
    place(j, best);
  }
  return s;
}

}  // namespace dsidx::distsim
