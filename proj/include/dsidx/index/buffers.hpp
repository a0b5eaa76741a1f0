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
#include <cstddef>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dsidx/core/breakpoints.hpp"
#include "dsidx/core/isax.hpp"
#include "dsidx/core/paa.hpp"
#include "dsidx/core/params.hpp"
#include "dsidx/index/node.hpp"

namespace dsidx {

/// iSAX buffers: one per (root subtree, worker). Each worker writes only its
/// own buffers, so the summarization phase needs no locking.
class ISAXBufferSet {
 public:
  struct Buffer {
    std::vector<SeriesId> ids;
    std::vector<Symbol> words;  // packed, maximum cardinality

    std::size_t size() const noexcept { return ids.size(); }
  };
  using WorkerBuffers = std::unordered_map<SubtreeId, Buffer>;

  ISAXBufferSet(std::size_t workers, std::size_t segments)
      : segments_(segments), per_worker_(std::max<std::size_t>(workers, 1)) {}

  std::size_t workers() const noexcept { return per_worker_.size(); }
  std::size_t segments() const noexcept { return segments_; }

  void append(std::size_t worker, SubtreeId subtree, SeriesId id, std::span<const Symbol> word) {
    auto& buf = per_worker_[worker][subtree];
    buf.ids.push_back(id);
    buf.words.insert(buf.words.end(), word.begin(), word.end());
  }

  const WorkerBuffers& of_worker(std::size_t worker) const { return per_worker_[worker]; }

  /// (subtree, total entries) over all workers, ascending subtree id.
  std::vector<std::pair<SubtreeId, std::size_t>> subtree_sizes() const {
    std::unordered_map<SubtreeId, std::size_t> totals;
    for (const auto& m : per_worker_) {
      for (const auto& [id, buf] : m) totals[id] += buf.size();
    }
    std::vector<std::pair<SubtreeId, std::size_t>> out(totals.begin(), totals.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t total() const noexcept {
    std::size_t n = 0;
    for (const auto& m : per_worker_) {
      for (const auto& [id, buf] : m) n += buf.size();
    }
    return n;
  }

 private:
  std::size_t segments_;
  std::vector<WorkerBuffers> per_worker_;
};

/// Summarizes `count` consecutive series starting at `values` (ids from
/// first_id) into `worker`'s buffers.
inline void summarize_into_buffers(std::span<const float> values, std::size_t count,
                                   SeriesId first_id, const SummaryParams& params,
                                   const BreakpointTable& table, std::size_t worker,
                                   ISAXBufferSet& buffers) {
  std::vector<double> paa(params.segments);
  std::vector<Symbol> word(params.segments);
  for (std::size_t k = 0; k < count; ++k) {
    paa_into(values.subspan(k * params.length, params.length), params, std::span<double>(paa));
    symbolize_into(paa, params.max_card_bits, table, word);
    buffers.append(worker, root_subtree_of(word, params.max_card_bits),
                   static_cast<SeriesId>(first_id + k), word);
  }
}

}  // namespace dsidx
