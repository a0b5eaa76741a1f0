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
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dsidx/core/breakpoints.hpp"
#include "dsidx/core/isax.hpp"
#include "dsidx/core/lower_bound.hpp"
#include "dsidx/core/params.hpp"
#include "dsidx/error.hpp"

namespace dsidx {

using NodeSummary = ISAXWord;

/// Index tree node. Leaves hold (word, id) entries with words packed at
/// maximum cardinality; internal nodes hold exactly two children split on
/// one segment and no entries.
struct Node {
  NodeSummary summary;
  std::size_t count = 0;  // entries in the subtree
  int split_segment = -1;
  std::array<std::unique_ptr<Node>, 2> children;
  std::vector<SeriesId> ids;
  std::vector<Symbol> words;
  bool overflow = false;

  bool is_leaf() const noexcept { return !children[0]; }
  std::size_t entries() const noexcept { return ids.size(); }
  std::span<const Symbol> word(std::size_t k) const noexcept {
    const std::size_t w = summary.size();
    return {words.data() + k * w, w};
  }
};

/// Root subtree of a word: the leading bit of each segment's symbol, packed
/// with segment 0 as the most significant bit.
inline SubtreeId root_subtree_of(const ISAXWord& word) {
  SubtreeId id = 0;
  for (const auto& s : word.segments) {
    if (s.card_bits < 1) throw InputError("root_subtree_of needs at least one bit per segment");
    id = (id << 1) | static_cast<SubtreeId>((s.symbol >> (s.card_bits - 1)) & 1u);
  }
  return id;
}

inline SubtreeId root_subtree_of(std::span<const Symbol> max_word, unsigned max_card_bits) noexcept {
  SubtreeId id = 0;
  for (Symbol s : max_word) id = (id << 1) | static_cast<SubtreeId>((s >> (max_card_bits - 1)) & 1u);
  return id;
}

/// Summary of the root child `id`: one bit of cardinality per segment.
inline NodeSummary root_summary(SubtreeId id, std::size_t segments) {
  NodeSummary s;
  s.segments.resize(segments);
  for (std::size_t i = 0; i < segments; ++i) {
    s.segments[i] = {static_cast<Symbol>((id >> (segments - 1 - i)) & 1u), 1};
  }
  return s;
}

/// Segment to refine when splitting: lowest current cardinality, then lowest
/// index. Returns -1 when every segment is at maximum cardinality.
inline int choose_split_segment(const NodeSummary& summary, unsigned max_card_bits) noexcept {
  int best = -1;
  unsigned best_bits = max_card_bits;
  for (std::size_t i = 0; i < summary.size(); ++i) {
    const unsigned bits = summary.segments[i].card_bits;
    if (bits < best_bits) {
      best_bits = bits;
      best = static_cast<int>(i);
    }
  }
  return best;
}

/// Splits an over-full leaf into two children by promoting one segment by a
/// bit and redistributing entries on that bit. When no segment can be
/// promoted the leaf is marked overflow, keeps its entries and false is
/// returned.
inline bool split_leaf(Node& leaf, const SummaryParams& params, std::size_t leaf_capacity) {
  if (!leaf.is_leaf()) throw InputError("split_leaf called on an internal node");
  if (leaf.entries() <= leaf_capacity) {
    throw InputError("split_leaf needs more than " + std::to_string(leaf_capacity) +
                     " entries, leaf has " + std::to_string(leaf.entries()));
  }
  const int seg = choose_split_segment(leaf.summary, params.max_card_bits);
  if (seg < 0) {
    leaf.overflow = true;
    return false;
  }
  const unsigned child_bits = leaf.summary.segments[seg].card_bits + 1u;
  const unsigned shift = params.max_card_bits - child_bits;

  for (unsigned b = 0; b < 2; ++b) {
    auto child = std::make_unique<Node>();
    child->summary = leaf.summary;
    auto& s = child->summary.segments[seg];
    s.symbol = static_cast<Symbol>((s.symbol << 1) | b);
    s.card_bits = static_cast<std::uint8_t>(child_bits);
    leaf.children[b] = std::move(child);
  }
  for (std::size_t k = 0; k < leaf.entries(); ++k) {
    const auto word = leaf.word(k);
    Node& dst = *leaf.children[(word[seg] >> shift) & 1u];
    dst.ids.push_back(leaf.ids[k]);
    dst.words.insert(dst.words.end(), word.begin(), word.end());
  }
  for (auto& c : leaf.children) c->count = c->ids.size();
  leaf.split_segment = seg;
  leaf.ids = {};
  leaf.words = {};
  return true;
}

inline double node_mindist_sq(std::span<const double> query_paa, const Node& node,
                              const SummaryParams& params, const BreakpointTable& table) {
  return mindist_sq(query_paa, node.summary, params, table);
}

inline double node_mindist(const PAASummary& query_paa, const NodeSummary& node,
                           const SummaryParams& params, const BreakpointTable& table) {
  return std::sqrt(mindist_sq(query_paa.means, node, params, table));
}

}  // namespace dsidx
