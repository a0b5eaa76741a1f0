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
#include <optional>
#include <vector>

namespace dsidx::distsim {

/// A (query, partition) unit of work with its predicted cost in simulated
/// milliseconds.
struct QueryJob {
  std::size_t query_id = 0;
  std::size_t partition = 0;
  double initial_bsf = 0.0;
  double partition_size = 0.0;
  double predicted_cost = 1.0;
  std::optional<double> measured_cost;
  std::vector<float> series;  // empty for synthetic jobs
};

}  // namespace dsidx::distsim
