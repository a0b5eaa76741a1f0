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

#include <atomic>
#include <limits>
#include <mutex>
#include <vector>

#include "dsidx/core/params.hpp"
#include "dsidx/engines/result.hpp"

namespace dsidx {

/// Best-so-far answer shared by the workers of one query, in squared
/// distance space.
///
/// Readers use load(), a single atomic read of the current distance. Updates
/// are compare-and-lower: a candidate is accepted iff it is strictly smaller,
/// or equal with a lower id. Candidates that are larger than the published
/// distance are rejected without locking; the rest serialize on a mutex, so
/// the (distance, id) pair changes atomically.
class SharedBsf {
 public:
  struct Snapshot {
    double distance_sq = std::numeric_limits<double>::infinity();
    SeriesId id = kNoSeries;
  };

  SharedBsf() = default;
  SharedBsf(double distance_sq, SeriesId id) : published_(distance_sq), best_{distance_sq, id} {}

  double load() const noexcept { return published_.load(std::memory_order_acquire); }

  Snapshot snapshot() const {
    std::lock_guard lock(mu_);
    return best_;
  }

  bool update(double distance_sq, SeriesId id) {
    if (distance_sq > published_.load(std::memory_order_acquire)) return false;
    std::lock_guard lock(mu_);
    if (distance_sq < best_.distance_sq || (distance_sq == best_.distance_sq && id < best_.id)) {
      best_ = {distance_sq, id};
      published_.store(distance_sq, std::memory_order_release);
      if (keep_history_) history_.push_back(best_);
      return true;
    }
    return false;
  }

  /// Records every accepted update; for tests asserting monotonicity.
  void keep_history(bool on) {
    std::lock_guard lock(mu_);
    keep_history_ = on;
  }
  std::vector<Snapshot> history() const {
    std::lock_guard lock(mu_);
    return history_;
  }

 private:
  std::atomic<double> published_{std::numeric_limits<double>::infinity()};
  mutable std::mutex mu_;
  Snapshot best_;
  bool keep_history_ = false;
  std::vector<Snapshot> history_;
};

inline bool bsf_update(SharedBsf& shared, double candidate_distance, SeriesId candidate_id) {
  return shared.update(candidate_distance, candidate_id);
}

}  // namespace dsidx
