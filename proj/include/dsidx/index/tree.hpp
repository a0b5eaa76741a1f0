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
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "dsidx/core/params.hpp"
#include "dsidx/index/node.hpp"

namespace dsidx {

/// iSAX index: up to 2^w root children, each the root of a leaf-oriented
/// binary tree. Immutable once built.
class IndexTree {
 public:
  struct RootChild {
    SubtreeId id = 0;
    std::unique_ptr<Node> node;
  };

  IndexTree() = default;
  IndexTree(SummaryParams params, std::size_t leaf_capacity, std::vector<RootChild> children)
      : params_(params), leaf_capacity_(leaf_capacity), children_(std::move(children)) {
    std::sort(children_.begin(), children_.end(),
              [](const RootChild& a, const RootChild& b) { return a.id < b.id; });
    for (const auto& c : children_) {
      size_ += c.node->count;
      for_each_leaf_of(*c.node, [&](const Node& leaf) {
        ++leaves_;
        if (leaf.overflow) ++overflow_leaves_;
      });
    }
  }

  const SummaryParams& params() const noexcept { return params_; }
  std::size_t leaf_capacity() const noexcept { return leaf_capacity_; }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  std::size_t leaf_count() const noexcept { return leaves_; }
  /// Leaves left above capacity because all segments were at max cardinality.
  std::size_t overflow_leaves() const noexcept { return overflow_leaves_; }

  std::span<const RootChild> root_children() const noexcept { return children_; }

  const Node* find_root_child(SubtreeId id) const noexcept {
    auto it = std::lower_bound(children_.begin(), children_.end(), id,
                               [](const RootChild& c, SubtreeId v) { return c.id < v; });
    return it != children_.end() && it->id == id ? it->node.get() : nullptr;
  }

  /// Visits leaves left to right, root children in ascending id order.
  template <class F>
  void for_each_leaf(F&& fn) const {
    for (const auto& c : children_) for_each_leaf_of(*c.node, fn);
  }

  template <class F>
  static void for_each_leaf_of(const Node& node, F&& fn) {
    if (node.is_leaf()) {
      fn(node);
      return;
    }
    for_each_leaf_of(*node.children[0], fn);
    for_each_leaf_of(*node.children[1], fn);
  }

 private:
  SummaryParams params_;
  std::size_t leaf_capacity_ = 0;
  std::vector<RootChild> children_;
  std::size_t size_ = 0;
  std::size_t leaves_ = 0;
  std::size_t overflow_leaves_ = 0;
};

}  // namespace dsidx
