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
#include <chrono>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "dsidx/core/breakpoints.hpp"
#include "dsidx/core/dataset.hpp"
#include "dsidx/core/params.hpp"
#include "dsidx/error.hpp"
#include "dsidx/index/buffers.hpp"
#include "dsidx/index/node.hpp"
#include "dsidx/index/tree.hpp"
#include "dsidx/util/parallel.hpp"

namespace dsidx {

struct BuildOptions {
  std::size_t workers = 1;
  std::size_t leaf_capacity = 2000;
};

struct BuildStats {
  double summarize_ms = 0.0;
  double construct_ms = 0.0;
};

namespace detail {

inline void grow_subtree(Node& node, const SummaryParams& params, std::size_t capacity) {
  if (node.entries() <= capacity) return;
  if (!split_leaf(node, params, capacity)) return;
  grow_subtree(*node.children[0], params, capacity);
  grow_subtree(*node.children[1], params, capacity);
}

// Greedy assignment of subtrees to workers: largest subtree first, onto the
// least-loaded worker. Returns per-worker lists of indices into `sizes`.
inline std::vector<std::vector<std::size_t>> assign_subtrees(
    const std::vector<std::pair<SubtreeId, std::size_t>>& sizes, std::size_t workers) {
  std::vector<std::size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sizes[a].second > sizes[b].second; });
  std::vector<std::vector<std::size_t>> plan(workers);
  std::vector<std::size_t> load(workers, 0);
  for (std::size_t idx : order) {
    const auto w = static_cast<std::size_t>(std::min_element(load.begin(), load.end()) - load.begin());
    plan[w].push_back(idx);
    load[w] += sizes[idx].second;
  }
  return plan;
}

inline double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace detail

/// Tree construction phase: each root subtree is built by exactly one
/// worker from the entries every worker buffered for it. Entries are sorted
/// by id first, so the result does not depend on how the summarization
/// phase was partitioned.
inline IndexTree build_from_buffers(const ISAXBufferSet& buffers, const SummaryParams& params,
                                    const BuildOptions& options) {
  if (options.leaf_capacity == 0) throw InputError("leaf capacity must be positive");
  const std::size_t w = params.segments;
  const auto sizes = buffers.subtree_sizes();
  const std::size_t workers = std::max<std::size_t>(options.workers, 1);
  const auto plan = detail::assign_subtrees(sizes, workers);

  std::vector<IndexTree::RootChild> children(sizes.size());
  run_workers(workers, [&](std::size_t worker) {
    std::vector<std::size_t> perm;
    for (std::size_t idx : plan[worker]) {
      const SubtreeId id = sizes[idx].first;
      std::vector<SeriesId> ids;
      std::vector<Symbol> words;
      ids.reserve(sizes[idx].second);
      words.reserve(sizes[idx].second * w);
      for (std::size_t src = 0; src < buffers.workers(); ++src) {
        const auto& m = buffers.of_worker(src);
        auto it = m.find(id);
        if (it == m.end()) continue;
        ids.insert(ids.end(), it->second.ids.begin(), it->second.ids.end());
        words.insert(words.end(), it->second.words.begin(), it->second.words.end());
      }
      perm.resize(ids.size());
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });

      auto root = std::make_unique<Node>();
      root->summary = root_summary(id, w);
      root->ids.reserve(ids.size());
      root->words.reserve(words.size());
      for (std::size_t p : perm) {
        root->ids.push_back(ids[p]);
        root->words.insert(root->words.end(), words.begin() + p * w, words.begin() + (p + 1) * w);
      }
      root->count = root->ids.size();
      detail::grow_subtree(*root, params, options.leaf_capacity);
      children[idx] = {id, std::move(root)};
    }
  });
  return IndexTree(params, options.leaf_capacity, std::move(children));
}

/// Two-phase parallel build. Summarization: workers take contiguous slices
/// of the dataset and append (word, id) entries to their own iSAX buffers.
/// Construction: see build_from_buffers.
inline IndexTree build(const Dataset& dataset, const SummaryParams& params,
                       const BuildOptions& options = {}, BuildStats* stats = nullptr) {
  dataset.check_compatible(params);
  if (dataset.size() > std::numeric_limits<SeriesId>::max()) {
    throw InputError("dataset has more series than a 32-bit id can address");
  }
  const auto& table = BreakpointTable::shared(params.max_card_bits);
  const std::size_t workers = std::max<std::size_t>(options.workers, 1);

  auto t0 = std::chrono::steady_clock::now();
  ISAXBufferSet buffers(workers, params.segments);
  run_workers(workers, [&](std::size_t worker) {
    const auto [begin, end] = slice_of(dataset.size(), workers, worker);
    if (begin == end) return;
    std::span<const float> values(dataset.values().data() + begin * params.length,
                                  (end - begin) * params.length);
    summarize_into_buffers(values, end - begin, static_cast<SeriesId>(begin), params, table,
                           worker, buffers);
  });
  if (stats) stats->summarize_ms = detail::elapsed_ms(t0);

  t0 = std::chrono::steady_clock::now();
  IndexTree tree = build_from_buffers(buffers, params, options);
  if (stats) stats->construct_ms = detail::elapsed_ms(t0);
  return tree;
}

}  // namespace dsidx
