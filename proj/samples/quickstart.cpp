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

// Builds an index over a small random-walk collection and answers a few
// noisy queries with each exact engine, checking them against a linear scan.

#include <cstdio>

#include "dsidx/dsidx.hpp"

int main() {
  dsidx::SummaryParams params;
  params.length = 128;
  params.segments = 8;
  params.max_card_bits = 8;

  const auto data = dsidx::io::generate_random_walk(20000, params.length, 7);
  const auto queries = dsidx::io::derive_queries(data, 5, 0.1, 11);

  const auto tree = dsidx::build(data, params, {.workers = 2, .leaf_capacity = 500});
  const auto flat = dsidx::flatten(tree);
  std::printf("indexed %zu series: %zu root children, %zu leaves\n", tree.size(),
              tree.root_children().size(), tree.leaf_count());

  int mismatches = 0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto q = queries[i];
    const auto truth = dsidx::brute_force(data, q);
    const auto a = dsidx::exact_search_tree(tree, data, q, {.workers = 2});
    const auto b = dsidx::exact_search_flatscan(tree, flat.sax, data, q, {.workers = 2});
    const auto c = dsidx::exact_search_batched(flat.leaf_ordered, tree, data, q, {.workers = 2});
    std::printf("query %zu: id=%u dist=%.6f  tree=%zu flatscan=%zu batched=%zu real distances\n", i,
                truth.series_id, truth.distance, a.stats.real_distances, b.stats.real_distances,
                c.stats.real_distances);
    for (const auto* r : {&a, &b, &c}) {
      if (r->series_id != truth.series_id || r->distance != truth.distance) ++mismatches;
    }
  }
  std::printf("%s\n", mismatches == 0 ? "all engines agree with the linear scan" : "MISMATCH");
  return mismatches == 0 ? 0 : 1;
}
