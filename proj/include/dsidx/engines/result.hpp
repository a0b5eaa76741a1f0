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

#include <cstddef>
#include <limits>
#include <vector>

#include "dsidx/core/params.hpp"

namespace dsidx {

inline constexpr SeriesId kNoSeries = std::numeric_limits<SeriesId>::max();

struct SearchStats {
  // Real distances computed, including the ones spent on the initial
  // approximate answer (init_distances).
  std::size_t real_distances = 0;
  std::size_t init_distances = 0;
  std::size_t lower_bounds = 0;
  // 1 - real_distances / dataset size.
  double pruning_ratio = 0.0;
  double wall_ms = 0.0;
  double initial_bsf = 0.0;

  // Tree engine: per-queue sizes right after the insertion phase.
  std::vector<std::size_t> queue_sizes;
  // Flat-scan engine: candidate list length.
  std::size_t candidates = 0;
  // Batched engine: root-subtree ranges that survived initial pruning.
  std::size_t ranges_total = 0;
  std::size_t ranges_scanned = 0;
};

/// Exact 1-NN answer. `distance` is the true (rooted) Euclidean distance.
struct QueryResult {
  SeriesId series_id = kNoSeries;
  double distance = std::numeric_limits<double>::infinity();
  SearchStats stats;
};

}  // namespace dsidx
