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

#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "dsidx/core/breakpoints.hpp"
#include "dsidx/core/dataset.hpp"
#include "dsidx/core/distance.hpp"
#include "dsidx/core/lower_bound.hpp"
#include "dsidx/engines/approximate.hpp"
#include "dsidx/engines/bsf.hpp"
#include "dsidx/engines/priority_queues.hpp"
#include "dsidx/engines/query.hpp"
#include "dsidx/engines/result.hpp"
#include "dsidx/index/tree.hpp"
#include "dsidx/util/parallel.hpp"

namespace dsidx {

struct TreeSearchOptions {
  std::size_t workers = 1;
  // 0 means one queue per worker.
  std::size_t queues = 0;
  std::uint64_t seed = 0x5eed;
  // Overrides the approximate-search initialization when set (tests).
  SharedBsf* bsf = nullptr;
};

/// Exact 1-NN over the index tree with node-level pruning and a set of
/// priority queues.
///
/// Insertion phase: workers claim root children and walk them depth first,
/// dropping every node whose bound is >= BSF; surviving non-empty leaves go
/// into one of the queues (two random choices, smaller queue wins).
/// Processing phase: workers pop leaves in bound order. A popped bound >= BSF
/// means everything left in that queue is prunable, so the queue is retired;
/// otherwise each entry's series-level bound is checked before its real
/// distance is computed. Workers move on to other queues until all are
/// retired or empty.
inline QueryResult exact_search_tree(const IndexTree& tree, const Dataset& dataset,
                                     std::span<const float> query,
                                     const TreeSearchOptions& options = {}) {
  detail::Stopwatch clock;
  const auto& params = tree.params();
  const auto& table = BreakpointTable::shared(params.max_card_bits);
  const PreparedQuery q = prepare_query(query, params, table);
  const double scale = mindist_scale(params);
  const std::size_t workers = std::max<std::size_t>(options.workers, 1);
  const std::size_t queue_count = options.queues == 0 ? workers : options.queues;

  QueryResult result;
  SharedBsf own_bsf;
  SharedBsf* bsf = options.bsf;
  if (bsf == nullptr) {
    const auto approx = approximate_search(tree, dataset, q, table);
    own_bsf.update(approx.distance_sq, approx.series_id);
    result.stats.init_distances = approx.distances_computed;
    bsf = &own_bsf;
  }
  result.stats.initial_bsf = std::sqrt(bsf->load());

  PriorityQueueSet<const Node*> queues(queue_count);
  std::atomic<std::size_t> next_child{0};
  std::vector<std::size_t> bounds(workers, 0);
  std::vector<std::size_t> reals(workers, 0);
  const auto children = tree.root_children();

  run_workers(workers, [&](std::size_t w) {
    std::mt19937_64 rng(options.seed + 0x9e3779b97f4a7c15ull * (w + 1));
    std::vector<const Node*> stack;
    for (std::size_t c; (c = next_child.fetch_add(1, std::memory_order_relaxed)) < children.size();) {
      stack.push_back(children[c].node.get());
      while (!stack.empty()) {
        const Node* node = stack.back();
        stack.pop_back();
        if (node->count == 0) continue;
        const double bound = node_mindist_sq(q.paa, *node, params, table);
        ++bounds[w];
        if (bound >= bsf->load()) continue;
        if (node->is_leaf()) {
          queues.push_balanced(bound, node, rng);
        } else {
          stack.push_back(node->children[1].get());
          stack.push_back(node->children[0].get());
        }
      }
    }
  });
  result.stats.queue_sizes = queues.sizes();

  std::vector<std::atomic<bool>> retired(queue_count);
  run_workers(workers, [&](std::size_t w) {
    std::size_t cursor = w % queue_count;
    for (;;) {
      std::size_t probe = 0;
      while (probe < queue_count && retired[cursor].load(std::memory_order_acquire)) {
        cursor = (cursor + 1) % queue_count;
        ++probe;
      }
      if (probe == queue_count) break;
      auto entry = queues.pop(cursor);
      if (!entry || entry->key >= bsf->load()) {
        retired[cursor].store(true, std::memory_order_release);
        continue;
      }
      const Node& leaf = *entry->value;
      for (std::size_t k = 0; k < leaf.entries(); ++k) {
        const double limit = bsf->load();
        const double lb =
            mindist_sq_symbols(q.paa, leaf.word(k), params.max_card_bits, scale, table);
        ++bounds[w];
        if (lb >= limit) continue;
        const SeriesId id = leaf.ids[k];
        const double d = squared_euclidean(q.series(), dataset[id], limit);
        ++reals[w];
        if (d <= limit) bsf->update(d, id);
      }
    }
  });

  const auto best = bsf->snapshot();
  result.series_id = best.id;
  result.distance = std::sqrt(best.distance_sq);
  result.stats.real_distances = result.stats.init_distances;
  for (std::size_t w = 0; w < workers; ++w) {
    result.stats.lower_bounds += bounds[w];
    result.stats.real_distances += reals[w];
  }
  result.stats.pruning_ratio =
      1.0 - static_cast<double>(result.stats.real_distances) / static_cast<double>(tree.size());
  result.stats.wall_ms = clock.ms();
  return result;
}

}  // namespace dsidx
