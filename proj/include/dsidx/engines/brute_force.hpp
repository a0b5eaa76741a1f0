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
#include <string>
#include <vector>

#include "dsidx/core/dataset.hpp"
#include "dsidx/core/distance.hpp"
#include "dsidx/engines/query.hpp"
#include "dsidx/engines/result.hpp"
#include "dsidx/error.hpp"
#include "dsidx/util/parallel.hpp"

namespace dsidx {

/// Exhaustive scan; the correctness oracle for the indexed engines. Lowest
/// id wins on equal distance.
inline QueryResult brute_force(const Dataset& dataset, std::span<const float> query,
                               std::size_t workers = 1) {
  if (dataset.empty()) throw InputError("brute force over an empty dataset");
  if (query.size() != dataset.length()) {
    throw InputError("query length " + std::to_string(query.size()) +
                     " does not match dataset length " + std::to_string(dataset.length()));
  }
  detail::Stopwatch clock;
  workers = std::max<std::size_t>(workers, 1);
  std::vector<double> best(workers, std::numeric_limits<double>::infinity());
  std::vector<SeriesId> best_id(workers, kNoSeries);
  run_workers(workers, [&](std::size_t w) {
    const auto [begin, end] = slice_of(dataset.size(), workers, w);
    for (std::size_t i = begin; i < end; ++i) {
      // Abandoning only above the current best keeps ties fully evaluated.
      const double d = squared_euclidean(query, dataset[i], best[w]);
      if (d < best[w]) {
        best[w] = d;
        best_id[w] = static_cast<SeriesId>(i);
      }
    }
  });
  QueryResult r;
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < workers; ++w) {
    if (best[w] < best_sq || (best[w] == best_sq && best_id[w] < r.series_id)) {
      best_sq = best[w];
      r.series_id = best_id[w];
    }
  }
  r.distance = std::sqrt(best_sq);
  r.stats.real_distances = dataset.size();
  r.stats.pruning_ratio = 0.0;
  r.stats.wall_ms = clock.ms();
  return r;
}

}  // namespace dsidx
