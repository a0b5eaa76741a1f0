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
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "dsidx/error.hpp"

namespace dsidx::distsim {

using NodeId = std::size_t;

struct Partition {
  std::size_t first = 0;  // first series id
  std::size_t count = 0;
  NodeId primary = 0;
  std::vector<NodeId> replicas;

  bool held_by(NodeId node) const noexcept {
    return node == primary || std::find(replicas.begin(), replicas.end(), node) != replicas.end();
  }
  std::vector<NodeId> holders() const {
    std::vector<NodeId> h{primary};
    h.insert(h.end(), replicas.begin(), replicas.end());
    return h;
  }
};

/// Contiguous id-range partitions, each held by a primary and `replication`
/// distinct replica nodes.
struct PartitionMap {
  std::size_t nodes = 0;
  std::size_t replication = 0;
  std::vector<Partition> partitions;

  bool holds(NodeId node, std::size_t partition) const {
    return partitions.at(partition).held_by(node);
  }

  std::vector<std::size_t> holder_counts() const {
    std::vector<std::size_t> h(nodes, 0);
    for (const auto& p : partitions) {
      for (NodeId n : p.holders()) ++h[n];
    }
    return h;
  }
};

/// Splits [0, dataset_size) into `partitions` contiguous ranges. Primaries go
/// round robin; replicas go to the non-primary nodes holding the fewest
/// partitions so far (seeded tie-break), followed by a repair pass that moves
/// replicas from the most to the least loaded node while that is possible.
inline PartitionMap partition(std::size_t dataset_size, std::size_t partitions, std::size_t nodes,
                              std::size_t replication, std::uint64_t seed) {
  if (nodes < 1) throw InputError("need at least one node");
  if (partitions < nodes) {
    throw InputError("partitions (" + std::to_string(partitions) + ") must be >= nodes (" +
                     std::to_string(nodes) + ")");
  }
  if (replication >= nodes) {
    throw InputError("replication degree " + std::to_string(replication) +
                     " must be below the node count " + std::to_string(nodes));
  }
  if (dataset_size < partitions) {
    throw InputError("dataset of " + std::to_string(dataset_size) + " series cannot fill " +
                     std::to_string(partitions) + " partitions");
  }

  PartitionMap map;
  map.nodes = nodes;
  map.replication = replication;
  map.partitions.resize(partitions);
  std::vector<std::size_t> held(nodes, 0);
  for (std::size_t p = 0; p < partitions; ++p) {
    auto& part = map.partitions[p];
    part.first = p * dataset_size / partitions;
    part.count = (p + 1) * dataset_size / partitions - part.first;
    part.primary = p % nodes;
    ++held[part.primary];
  }

  std::mt19937_64 rng(seed);
  std::vector<NodeId> order(nodes);
  for (auto& part : map.partitions) {
    std::iota(order.begin(), order.end(), NodeId{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return held[a] < held[b]; });
    for (NodeId n : order) {
      if (part.replicas.size() == replication) break;
      if (n == part.primary) continue;
      part.replicas.push_back(n);
      ++held[n];
    }
  }

  // Repair: move a replica from the most to the least loaded node.
  for (std::size_t guard = 0; guard < partitions * nodes; ++guard) {
    const auto [lo_it, hi_it] = std::minmax_element(held.begin(), held.end());
    if (*hi_it - *lo_it <= 1) break;
    const NodeId hi = static_cast<NodeId>(hi_it - held.begin());
    const NodeId lo = static_cast<NodeId>(lo_it - held.begin());
    bool moved = false;
    for (auto& part : map.partitions) {
      auto it = std::find(part.replicas.begin(), part.replicas.end(), hi);
      if (it != part.replicas.end() && !part.held_by(lo)) {
        *it = lo;
        --held[hi];
        ++held[lo];
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  for (auto& part : map.partitions) std::sort(part.replicas.begin(), part.replicas.end());
  return map;
}

}  // namespace dsidx::distsim
