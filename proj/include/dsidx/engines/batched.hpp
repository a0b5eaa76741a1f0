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
#include <atomic>
#include <cmath>
#include <span>
#include <vector>

#include "dsidx/core/breakpoints.hpp"
#include "dsidx/core/dataset.hpp"
#include "dsidx/core/distance.hpp"
#include "dsidx/core/lower_bound.hpp"
#include "dsidx/engines/approximate.hpp"
#include "dsidx/engines/bsf.hpp"
#include "dsidx/engines/channel.hpp"
#include "dsidx/engines/flatscan.hpp"
#include "dsidx/engines/query.hpp"
#include "dsidx/engines/result.hpp"
#include "dsidx/index/flatten.hpp"
#include "dsidx/index/tree.hpp"
#include "dsidx/util/parallel.hpp"

namespace dsidx {

struct BatchedOptions {
  // Consumer threads computing real distances; one extra thread produces
  // bounds.
  std::size_t workers = 1;
  std::size_t block_size = 4096;
  std::size_t channel_capacity = 4;
};

/// Exact 1-NN over the leaf-ordered summary array.
///
/// Whole root-subtree ranges are dropped first when the root child's bound
/// is >= BSF. A producer then runs the branch-free bound kernel over the
/// surviving ranges block by block and hands each block's survivors to the
/// consumers through a bounded channel, so bound computation overlaps with
/// real-distance refinement.
inline QueryResult exact_search_batched(const LeafOrderedArray& arrays, const IndexTree& tree,
                                        const Dataset& dataset, std::span<const float> query,
                                        const BatchedOptions& options = {}) {
  detail::Stopwatch clock;
  const auto& params = tree.params();
  const auto& table = BreakpointTable::shared(params.max_card_bits);
  const PreparedQuery q = prepare_query(query, params, table);
  const std::size_t consumers = std::max<std::size_t>(options.workers, 1);
  const std::size_t block = std::max<std::size_t>(options.block_size, 1);

  QueryResult result;
  const auto approx = approximate_search(tree, dataset, q, table);
  SharedBsf bsf(approx.distance_sq, approx.series_id);
  result.stats.init_distances = approx.distances_computed;
  result.stats.initial_bsf = approx.distance;

  std::vector<SubtreeRange> surviving;
  for (const auto& range : arrays.ranges) {
    const Node* root = tree.find_root_child(range.subtree);
    if (root == nullptr) continue;
    ++result.stats.lower_bounds;
    if (node_mindist_sq(q.paa, *root, params, table) < bsf.load()) surviving.push_back(range);
  }
  result.stats.ranges_total = arrays.ranges.size();
  result.stats.ranges_scanned = surviving.size();

  const BatchedLowerBound kernel(q.paa, params.max_card_bits, params, table);
  BoundedChannel<std::vector<Candidate>> channel(options.channel_capacity);
  std::size_t produced_bounds = 0;
  std::vector<std::size_t> reals(consumers + 1, 0);

  run_workers(consumers + 1, [&](std::size_t w) {
    if (w == 0) {
      try {
        std::vector<double> bounds(block);
        for (const auto& range : surviving) {
          for (std::size_t b = 0; b < range.length; b += block) {
            const std::size_t n = std::min(block, range.length - b);
            const std::size_t at = range.offset + b;
            kernel.squared(std::span<const Symbol>(arrays.words)
                               .subspan(at * arrays.segments, n * arrays.segments),
                           bounds);
            produced_bounds += n;
            const double limit = bsf.load();
            std::vector<Candidate> survivors;
            for (std::size_t k = 0; k < n; ++k) {
              if (bounds[k] < limit) survivors.push_back({arrays.ids[at + k], bounds[k]});
            }
            if (!survivors.empty()) channel.push(std::move(survivors));
          }
        }
      } catch (...) {
        channel.close();
        throw;
      }
      channel.close();
      return;
    }
    while (auto batch = channel.pop()) {
      for (const auto& c : *batch) {
        const double limit = bsf.load();
        if (c.bound_sq >= limit) continue;
        const double d = squared_euclidean(q.series(), dataset[c.id], limit);
        ++reals[w];
        if (d <= limit) bsf.update(d, c.id);
      }
    }
  });

  const auto best = bsf.snapshot();
  result.series_id = best.id;
  result.distance = std::sqrt(best.distance_sq);
  result.stats.lower_bounds += produced_bounds;
  result.stats.real_distances = result.stats.init_distances;
  for (auto r : reals) result.stats.real_distances += r;
  result.stats.pruning_ratio =
      1.0 - static_cast<double>(result.stats.real_distances) / static_cast<double>(tree.size());
  result.stats.wall_ms = clock.ms();
  return result;
}

}  // namespace dsidx
