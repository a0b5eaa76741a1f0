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
#include <span>
#include <vector>

#include "dsidx/core/breakpoints.hpp"
#include "dsidx/core/dataset.hpp"
#include "dsidx/core/params.hpp"
#include "dsidx/distsim/cost_model.hpp"
#include "dsidx/distsim/job.hpp"
#include "dsidx/distsim/partition.hpp"
#include "dsidx/engines/approximate.hpp"
#include "dsidx/engines/result.hpp"
#include "dsidx/engines/tree_search.hpp"
#include "dsidx/index/build.hpp"
#include "dsidx/index/tree.hpp"

namespace dsidx::distsim {

/// Index over one partition. Ids inside are local; add `first` for the
/// global id.
struct PartitionIndex {
  std::size_t first = 0;
  Dataset data;
  IndexTree tree;
};

inline std::vector<PartitionIndex> build_partition_indexes(const Dataset& dataset,
                                                           const PartitionMap& map,
                                                           const SummaryParams& params,
                                                           const BuildOptions& options) {
  std::vector<PartitionIndex> out;
  out.reserve(map.partitions.size());
  for (const auto& part : map.partitions) {
    PartitionIndex pi;
    pi.first = part.first;
    pi.data = Dataset(dataset.length(),
                      std::vector<float>(dataset.values().begin() + part.first * dataset.length(),
                                         dataset.values().begin() +
                                             (part.first + part.count) * dataset.length()),
                      dataset.flags());
    pi.tree = build(pi.data, params, options);
    out.push_back(std::move(pi));
  }
  return out;
}

struct MeasuredBatch {
  std::vector<QueryJob> jobs;
  // Per query: minimum over its partition answers, with global ids.
  std::vector<QueryResult> answers;
};

/// One job per (query, partition) pair. Each job is executed with the tree
/// engine on its partition's index; the initial BSF and the wall time become
/// the job's features and measured cost (milliseconds).
inline MeasuredBatch measure_batch(const Dataset& queries, std::span<const PartitionIndex> indexes,
                                   const TreeSearchOptions& options) {
  MeasuredBatch batch;
  batch.answers.resize(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    for (std::size_t p = 0; p < indexes.size(); ++p) {
      const auto& pi = indexes[p];
      const auto r = exact_search_tree(pi.tree, pi.data, queries[q], options);
      QueryJob job;
      job.query_id = q;
      job.partition = p;
      job.initial_bsf = r.stats.initial_bsf;
      job.partition_size = static_cast<double>(pi.data.size());
      job.measured_cost = r.stats.wall_ms;
      job.series.assign(queries[q].begin(), queries[q].end());
      batch.jobs.push_back(std::move(job));

      const auto global = static_cast<SeriesId>(pi.first + r.series_id);
      auto& best = batch.answers[q];
      if (r.distance < best.distance || (r.distance == best.distance && global < best.series_id)) {
        best.distance = r.distance;
        best.series_id = global;
      }
    }
  }
  return batch;
}

/// Calibrates on the first `warmup` jobs and sets every job's prediction.
inline CostModel predict_costs(std::vector<QueryJob>& jobs, std::size_t warmup) {
  const auto model = calibrate(std::span<const QueryJob>(jobs).first(std::min(warmup, jobs.size())));
  for (auto& j : jobs) j.predicted_cost = model.predict(j);
  return model;
}

}  // namespace dsidx::distsim
