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

#include <array>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "dsidx/core/params.hpp"
#include "dsidx/error.hpp"

namespace dsidx::io {

/// Two chunk buffers shared between one coordinator (which fills them from
/// input) and a group of workers (which consume them). Chunk k always lives
/// in buffer k % 2. State transitions are the only synchronization points:
///
///   idle --acquire_for_fill--> filling --publish--> processing --release--> idle
///
/// Workers only see a buffer through wait_chunk, which returns once the
/// buffer is in the processing state.
class DoubleBuffer {
 public:
  enum class State { kIdle, kFilling, kProcessing };

  struct Chunk {
    std::size_t buffer = 0;
    std::uint64_t seq = 0;
    SeriesId first_id = 0;
    std::size_t count = 0;
    std::span<const float> values;
  };

  DoubleBuffer(std::size_t chunk_series, std::size_t length)
      : chunk_series_(chunk_series), length_(length) {
    for (auto& b : bufs_) b.data.resize(chunk_series * length);
  }

  std::size_t chunk_series() const noexcept { return chunk_series_; }

  /// Coordinator: waits until the buffer for chunk `seq` is idle and marks
  /// it filling. Returns the area to write the chunk into.
  std::span<float> acquire_for_fill(std::uint64_t seq) {
    std::unique_lock lock(mu_);
    auto& b = bufs_[seq % 2];
    cv_.wait(lock, [&] { return b.state == State::kIdle || aborted_; });
    if (aborted_) throw Error("double buffer aborted");
    if (bufs_[(seq + 1) % 2].state == State::kFilling) {
      throw InvariantError("double buffer: both buffers in filling state");
    }
    b.state = State::kFilling;
    return b.data;
  }

  /// Coordinator: hands a filled buffer to `consumers` workers.
  void publish(std::uint64_t seq, SeriesId first_id, std::size_t count, std::size_t consumers) {
    std::lock_guard lock(mu_);
    auto& b = bufs_[seq % 2];
    if (b.state != State::kFilling) throw InvariantError("double buffer: publish without fill");
    b.state = State::kProcessing;
    b.seq = seq;
    b.first_id = first_id;
    b.count = count;
    b.pending = consumers;
    cv_.notify_all();
  }

  /// Coordinator: no chunk at or after `total` will be published.
  void finish(std::uint64_t total) {
    std::lock_guard lock(mu_);
    total_ = total;
    cv_.notify_all();
  }

  /// Wakes everybody up and makes further waits fail.
  void abort() {
    std::lock_guard lock(mu_);
    aborted_ = true;
    cv_.notify_all();
  }

  /// Worker: blocks until chunk `seq` is processing. nullopt once the input
  /// is exhausted or the pipeline aborted.
  std::optional<Chunk> wait_chunk(std::uint64_t seq) {
    std::unique_lock lock(mu_);
    auto& b = bufs_[seq % 2];
    cv_.wait(lock, [&] {
      return aborted_ || (b.state == State::kProcessing && b.seq == seq) ||
             (total_ && seq >= *total_);
    });
    if (aborted_ || (total_ && seq >= *total_)) return std::nullopt;
    return Chunk{seq % 2, seq, b.first_id, b.count,
                 std::span<const float>(b.data.data(), b.count * length_)};
  }

  /// Worker: done with its share of the chunk; the last one returns the
  /// buffer to idle.
  void release(const Chunk& chunk) {
    std::lock_guard lock(mu_);
    auto& b = bufs_[chunk.buffer];
    if (b.state != State::kProcessing) throw InvariantError("double buffer: release of idle buffer");
    if (--b.pending == 0) {
      b.state = State::kIdle;
      cv_.notify_all();
    }
  }

  State state(std::size_t buffer) const {
    std::lock_guard lock(mu_);
    return bufs_[buffer].state;
  }

 private:
  struct Buffer {
    std::vector<float> data;
    State state = State::kIdle;
    std::uint64_t seq = 0;
    SeriesId first_id = 0;
    std::size_t count = 0;
    std::size_t pending = 0;
  };

  std::size_t chunk_series_;
  std::size_t length_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::array<Buffer, 2> bufs_;
  std::optional<std::uint64_t> total_;
  bool aborted_ = false;
};

}  // namespace dsidx::io
