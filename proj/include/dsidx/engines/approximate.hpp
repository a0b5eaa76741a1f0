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

#include <cmath>
#include <limits>
#include <span>

#include "dsidx/core/breakpoints.hpp"
#include "dsidx/core/dataset.hpp"
#include "dsidx/core/distance.hpp"
#include "dsidx/engines/query.hpp"
#include "dsidx/engines/result.hpp"
#include "dsidx/error.hpp"
#include "dsidx/index/tree.hpp"

namespace dsidx {

struct ApproximateResult {
  SeriesId series_id = kNoSeries;
  double distance = std::numeric_limits<double>::infinity();
  double distance_sq = std::numeric_limits<double>::infinity();
  const Node* leaf = nullptr;
  std::size_t distances_computed = 0;
};

/// Leaf the approximate search descends to: the query's own root child (or
/// the one with the smallest bound when absent), then at each split the
/// child containing the query's word unless that child is empty.
inline const Node* approximate_leaf(const IndexTree& tree, const PreparedQuery& q,
                                    const BreakpointTable& table) {
  if (tree.empty()) throw InputError("approximate search on an empty tree");
  const auto& params = tree.params();
  const Node* node = tree.find_root_child(root_subtree_of(q.word, params.max_card_bits));
  if (node == nullptr) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& child : tree.root_children()) {
      const double b = node_mindist_sq(q.paa, *child.node, params, table);
      if (b < best) {
        best = b;
        node = child.node.get();
      }
    }
  }
  while (!node->is_leaf()) {
    const auto seg = static_cast<std::size_t>(node->split_segment);
    const unsigned bits = node->children[0]->summary.segments[seg].card_bits;
    const unsigned bit = (q.word[seg] >> (params.max_card_bits - bits)) & 1u;
    const Node* next = node->children[bit].get();
    if (next->count == 0) next = node->children[bit ^ 1u].get();
    node = next;
  }
  return node;
}

inline ApproximateResult approximate_search(const IndexTree& tree, const Dataset& dataset,
                                            const PreparedQuery& q, const BreakpointTable& table) {
  ApproximateResult r;
  r.leaf = approximate_leaf(tree, q, table);
  for (std::size_t k = 0; k < r.leaf->entries(); ++k) {
    const SeriesId id = r.leaf->ids[k];
    const double d = squared_euclidean(q.series(), dataset[id], r.distance_sq);
    ++r.distances_computed;
    if (d < r.distance_sq || (d == r.distance_sq && id < r.series_id)) {
      r.distance_sq = d;
      r.series_id = id;
    }
  }
  r.distance = std::sqrt(r.distance_sq);
  return r;
}

inline ApproximateResult approximate_search(const IndexTree& tree, const Dataset& dataset,
                                            std::span<const float> query) {
  const auto& table = BreakpointTable::shared(tree.params().max_card_bits);
  return approximate_search(tree, dataset, prepare_query(query, tree.params(), table), table);
}

}  // namespace dsidx
