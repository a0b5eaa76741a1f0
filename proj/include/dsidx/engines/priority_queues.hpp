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
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace dsidx {

/// A fixed set of min-priority queues keyed by lower bound. Each queue has
/// its own lock; there is no lock covering the whole set.
template <class T>
class PriorityQueueSet {
 public:
  struct Entry {
    double key;
    T value;
  };

  explicit PriorityQueueSet(std::size_t queues) {
    queues_.reserve(std::max<std::size_t>(queues, 1));
    for (std::size_t i = 0; i < std::max<std::size_t>(queues, 1); ++i) {
      queues_.push_back(std::make_unique<Queue>());
    }
  }

  std::size_t queue_count() const noexcept { return queues_.size(); }

  std::size_t size(std::size_t q) const noexcept {
    return queues_[q]->size.load(std::memory_order_relaxed);
  }

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> out;
    out.reserve(queues_.size());
    for (std::size_t q = 0; q < queues_.size(); ++q) out.push_back(size(q));
    return out;
  }

  void push(std::size_t q, double key, T value) {
    Queue& queue = *queues_[q];
    std::lock_guard lock(queue.mu);
    queue.heap.push_back({key, queue.next_seq++, std::move(value)});
    std::push_heap(queue.heap.begin(), queue.heap.end(), Greater{});
    queue.size.store(queue.heap.size(), std::memory_order_relaxed);
  }

  /// Two random distinct queues; the entry goes to the smaller one.
  template <class Rng>
  std::size_t push_balanced(double key, T value, Rng& rng) {
    const std::size_t n = queues_.size();
    std::size_t target = 0;
    if (n > 1) {
      const std::size_t a = static_cast<std::size_t>(rng() % n);
      std::size_t b = static_cast<std::size_t>(rng() % (n - 1));
      if (b >= a) ++b;
      target = size(b) < size(a) ? b : a;
    }
    push(target, key, std::move(value));
    return target;
  }

  std::optional<Entry> pop(std::size_t q) {
    Queue& queue = *queues_[q];
    std::lock_guard lock(queue.mu);
    if (queue.heap.empty()) return std::nullopt;
    std::pop_heap(queue.heap.begin(), queue.heap.end(), Greater{});
    Item item = std::move(queue.heap.back());
    queue.heap.pop_back();
    queue.size.store(queue.heap.size(), std::memory_order_relaxed);
    return Entry{item.key, std::move(item.value)};
  }

 private:
  struct Item {
    double key;
    std::uint64_t seq;
    T value;
  };
  struct Greater {
    bool operator()(const Item& a, const Item& b) const noexcept {
      return a.key != b.key ? a.key > b.key : a.seq > b.seq;
    }
  };
  struct Queue {
    std::mutex mu;
    std::vector<Item> heap;
    std::uint64_t next_seq = 0;
    std::atomic<std::size_t> size{0};
  };

  std::vector<std::unique_ptr<Queue>> queues_;
};

}  // namespace dsidx
