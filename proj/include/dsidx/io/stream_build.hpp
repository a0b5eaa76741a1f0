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
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "dsidx/core/breakpoints.hpp"
#include "dsidx/core/dataset.hpp"
#include "dsidx/core/params.hpp"
#include "dsidx/error.hpp"
#include "dsidx/index/buffers.hpp"
#include "dsidx/index/build.hpp"
#include "dsidx/index/tree.hpp"
#include "dsidx/io/double_buffer.hpp"
#include "dsidx/io/dsix.hpp"
#include "dsidx/util/parallel.hpp"

namespace dsidx::io {

struct StreamOptions {
  std::size_t workers = 1;
  std::size_t chunk_series = 65536;
  std::size_t leaf_capacity = 2000;
  // Also copy the raw series into memory for query answering.
  bool keep_raw = true;
};

struct TimelineEvent {
  enum class Kind { kRead, kSummarize };
  Kind kind;
  std::uint64_t chunk;
  std::size_t worker;
  double begin_ms;
  double end_ms;
};

struct StreamBuildResult {
  IndexTree tree;
  Dataset dataset;
  std::vector<TimelineEvent> timeline;
};

/// Wall time during which at least one read and at least one summarization
/// were in progress simultaneously.
inline double overlap_ms(const std::vector<TimelineEvent>& timeline) {
  auto merged = [&](TimelineEvent::Kind kind) {
    std::vector<std::pair<double, double>> iv;
    for (const auto& e : timeline) {
      if (e.kind == kind && e.end_ms > e.begin_ms) iv.emplace_back(e.begin_ms, e.end_ms);
    }
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<double, double>> out;
    for (const auto& i : iv) {
      if (!out.empty() && i.first <= out.back().second) {
        out.back().second = std::max(out.back().second, i.second);
      } else {
        out.push_back(i);
      }
    }
    return out;
  };
  const auto reads = merged(TimelineEvent::Kind::kRead);
  const auto work = merged(TimelineEvent::Kind::kSummarize);
  double total = 0.0;
  std::size_t j = 0;
  for (const auto& r : reads) {
    while (j < work.size() && work[j].second <= r.first) ++j;
    for (std::size_t k = j; k < work.size() && work[k].first < r.second; ++k) {
      total += std::min(r.second, work[k].second) - std::max(r.first, work[k].first);
    }
  }
  return total;
}

/// Builds the index while streaming the file through a double buffer: the
/// calling thread's coordinator reads chunk k+1 while the workers summarize
/// chunk k into their iSAX buffers. Tree construction then runs as in
/// build_from_buffers.
inline StreamBuildResult stream_build(const std::filesystem::path& path,
                                      const SummaryParams& params,
                                      const StreamOptions& options = {}) {
  params.validate();
  const std::size_t workers = std::max<std::size_t>(options.workers, 1);
  const std::size_t chunk = std::max<std::size_t>(options.chunk_series, 1);
  const auto& table = BreakpointTable::shared(params.max_card_bits);

  std::ifstream in;
  const DsixHeader header = open_dataset(path, in);
  if (header.length != params.length) {
    throw InputError("dataset series length " + std::to_string(header.length) +
                     " does not match summary length " + std::to_string(params.length));
  }
  if (header.count == 0) throw InputError("dataset is empty");
  if (header.count > std::numeric_limits<SeriesId>::max()) {
    throw InputError("dataset has more series than a 32-bit id can address");
  }
  const std::size_t count = header.count;
  const std::uint64_t chunks = (count + chunk - 1) / chunk;
  const std::size_t n = params.length;

  StreamBuildResult result;
  if (options.keep_raw) {
    result.dataset = Dataset(n, std::vector<float>(count * n), header.flags);
  }

  const auto t_start = std::chrono::steady_clock::now();
  auto now_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
        .count();
  };

  DoubleBuffer db(std::min(chunk, count), n);
  ISAXBufferSet buffers(workers, params.segments);
  std::vector<std::vector<TimelineEvent>> logs(workers + 1);
  std::exception_ptr reader_error;

  {
    std::jthread coordinator([&] {
      try {
        for (std::uint64_t seq = 0; seq < chunks; ++seq) {
          const std::size_t first = static_cast<std::size_t>(seq * chunk);
          const std::size_t len = std::min(chunk, count - first);
          auto area = db.acquire_for_fill(seq);
          const double t0 = now_ms();
          const auto bytes = static_cast<std::streamsize>(len * n * sizeof(float));
          in.read(reinterpret_cast<char*>(area.data()), bytes);
          if (in.gcount() != bytes) {
            throw FormatError(FormatErrorKind::kSizeMismatch,
                              kDsixHeaderSize + first * n * sizeof(float) +
                                  static_cast<std::uint64_t>(in.gcount()),
                              "short read from " + path.string());
          }
          floats_le_to_host(area.data(), len * n);
          logs[workers].push_back({TimelineEvent::Kind::kRead, seq, workers, t0, now_ms()});
          db.publish(seq, static_cast<SeriesId>(first), len, workers);
        }
        db.finish(chunks);
      } catch (...) {
        reader_error = std::current_exception();
        db.abort();
      }
    });

    run_workers(workers, [&](std::size_t w) {
      try {
        for (std::uint64_t seq = 0;; ++seq) {
          auto c = db.wait_chunk(seq);
          if (!c) break;
          const auto [begin, end] = slice_of(c->count, workers, w);
          const double t0 = now_ms();
          if (end > begin) {
            const auto values = c->values.subspan(begin * n, (end - begin) * n);
            summarize_into_buffers(values, end - begin, static_cast<SeriesId>(c->first_id + begin),
                                   params, table, w, buffers);
            if (options.keep_raw) {
              std::copy(values.begin(), values.end(),
                        result.dataset.series(c->first_id + begin).data());
            }
          }
          logs[w].push_back({TimelineEvent::Kind::kSummarize, seq, w, t0, now_ms()});
          db.release(*c);
        }
      } catch (...) {
        db.abort();
        throw;
      }
    });
  }
  if (reader_error) std::rethrow_exception(reader_error);

  for (auto& l : logs) result.timeline.insert(result.timeline.end(), l.begin(), l.end());
  result.tree = build_from_buffers(buffers, params, {workers, options.leaf_capacity});
  return result;
}

}  // namespace dsidx::io
