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
#include <vector>

#include "dsidx/core/params.hpp"
#include "dsidx/index/tree.hpp"

namespace dsidx {

/// Maximum-cardinality words of every series in collection order:
/// position i summarizes series i.
struct SaxArray {
  std::size_t segments = 0;
  std::vector<Symbol> words;
  std::vector<SeriesId> ids;

  std::size_t size() const noexcept { return ids.size(); }
  std::span<const Symbol> word(std::size_t i) const noexcept {
    return {words.data() + i * segments, segments};
  }
};

struct SubtreeRange {
  SubtreeId subtree = 0;
  std::size_t offset = 0;
  std::size_t length = 0;
};

/// Words in the order series appear in the leaves, with one contiguous
/// range per root subtree.
struct LeafOrderedArray {
  std::size_t segments = 0;
  std::vector<Symbol> words;
  std::vector<SeriesId> ids;
  std::vector<SubtreeRange> ranges;

  std::size_t size() const noexcept { return ids.size(); }
  std::span<const Symbol> word(std::size_t i) const noexcept {
    return {words.data() + i * segments, segments};
  }
};

struct FlatArrays {
  SaxArray sax;
  LeafOrderedArray leaf_ordered;
};

inline FlatArrays flatten(const IndexTree& tree) {
  const std::size_t w = tree.params().segments;
  const std::size_t n = tree.size();
  FlatArrays out;
  auto& lo = out.leaf_ordered;
  lo.segments = w;
  lo.words.reserve(n * w);
  lo.ids.reserve(n);
  for (const auto& child : tree.root_children()) {
    SubtreeRange range{child.id, lo.ids.size(), 0};
    IndexTree::for_each_leaf_of(*child.node, [&](const Node& leaf) {
      lo.ids.insert(lo.ids.end(), leaf.ids.begin(), leaf.ids.end());
      lo.words.insert(lo.words.end(), leaf.words.begin(), leaf.words.end());
    });
    range.length = lo.ids.size() - range.offset;
    lo.ranges.push_back(range);
  }

  auto& sax = out.sax;
  sax.segments = w;
  sax.words.resize(n * w);
  sax.ids.resize(n);
  for (std::size_t k = 0; k < lo.ids.size(); ++k) {
    const SeriesId id = lo.ids[k];
    sax.ids[id] = id;
    std::copy_n(lo.words.begin() + k * w, w, sax.words.begin() + static_cast<std::size_t>(id) * w);
  }
  return out;
}

}  // namespace dsidx
