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
#include "dsidx/engines/query.hpp"
#include "dsidx/engines/result.hpp"
#include "dsidx/index/flatten.hpp"
#include "dsidx/index/tree.hpp"
#include "dsidx/util/parallel.hpp"

namespace dsidx {

struct Candidate {
  SeriesId id;
  double bound_sq;
};

struct FlatScanOptions {
  std::size_t workers = 1;
  std::size_t scan_block = 1024;
  std::size_t refine_block = 64;
};

/// Series whose bound is < bsf_sq. Workers scan disjoint slices of the SAX
/// array into private lists that are concatenated in worker order, so the
/// result is sorted by position.
inline std::vector<Candidate> build_candidate_list(const SaxArray& sax,
                                                   std::span<const double> query_paa,
                                                   double bsf_sq, const SummaryParams& params,
                                                   const BreakpointTable& table,
                                                   std::size_t workers,
                                                   std::size_t scan_block = 1024) {
  workers = std::max<std::size_t>(workers, 1);
  scan_block = std::max<std::size_t>(scan_block, 1);
  const BatchedLowerBound kernel(query_paa, params.max_card_bits, params, table);
  std::vector<std::vector<Candidate>> lists(workers);
  run_workers(workers, [&](std::size_t w) {
    const auto [begin, end] = slice_of(sax.size(), workers, w);
    std::vector<double> bounds(scan_block);
    for (std::size_t b = begin; b < end; b += scan_block) {
      const std::size_t n = std::min(scan_block, end - b);
      kernel.squared(std::span<const Symbol>(sax.words).subspan(b * sax.segments, n * sax.segments),
                     bounds);
      for (std::size_t k = 0; k < n; ++k) {
        if (bounds[k] < bsf_sq) lists[w].push_back({sax.ids[b + k], bounds[k]});
      }
    }
  });
  std::vector<Candidate> out;
  std::size_t total = 0;
  for (const auto& l : lists) total += l.size();
  out.reserve(total);
  for (const auto& l : lists) out.insert(out.end(), l.begin(), l.end());
  return out;
}

/// Exact 1-NN by a flat scan of the SAX array: BSF from the tree, a parallel
/// bound scan that collects a candidate list, then parallel refinement of
/// the candidates. Each candidate's stored bound is re-checked against the
/// current BSF before its real distance is computed.
inline QueryResult exact_search_flatscan(const IndexTree& tree, const SaxArray& sax,
                                         const Dataset& dataset, std::span<const float> query,
                                         const FlatScanOptions& options = {}) {
  detail::Stopwatch clock;
  const auto& params = tree.params();
  const auto& table = BreakpointTable::shared(params.max_card_bits);
  const PreparedQuery q = prepare_query(query, params, table);
  const std::size_t workers = std::max<std::size_t>(options.workers, 1);

  QueryResult result;
  const auto approx = approximate_search(tree, dataset, q, table);
  SharedBsf bsf(approx.distance_sq, approx.series_id);
  result.stats.init_distances = approx.distances_computed;
  result.stats.initial_bsf = approx.distance;

  const auto candidates =
      build_candidate_list(sax, q.paa, bsf.load(), params, table, workers, options.scan_block);
  result.stats.candidates = candidates.size();

  const std::size_t block = std::max<std::size_t>(options.refine_block, 1);
  std::atomic<std::size_t> cursor{0};
  std::vector<std::size_t> reals(workers, 0);
  run_workers(workers, [&](std::size_t w) {
    for (std::size_t b; (b = cursor.fetch_add(block, std::memory_order_relaxed)) < candidates.size();) {
      const std::size_t end = std::min(b + block, candidates.size());
      for (std::size_t k = b; k < end; ++k) {
        const double limit = bsf.load();
        if (candidates[k].bound_sq >= limit) continue;
        const SeriesId id = candidates[k].id;
        const double d = squared_euclidean(q.series(), dataset[id], limit);
        ++reals[w];
        if (d <= limit) bsf.update(d, id);
      }
    }
  });

  const auto best = bsf.snapshot();
  result.series_id = best.id;
  result.distance = std::sqrt(best.distance_sq);
  result.stats.lower_bounds = sax.size();
  result.stats.real_distances = result.stats.init_distances;
  for (auto r : reals) result.stats.real_distances += r;
  result.stats.pruning_ratio =
      1.0 - static_cast<double>(result.stats.real_distances) / static_cast<double>(tree.size());
  result.stats.wall_ms = clock.ms();
  return result;
}

}  // namespace dsidx
