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

// Serialized index layout (little endian):
//
//   "DSXT" | u32 version | u64 length | u32 segments | u32 max_card_bits
//   | u64 leaf_capacity | u64 series count | u64 config hash | u64 seed
//   | u32 root children | { u32 subtree id, node }*
//
//   node := u8 kind (0 leaf, 1 internal) | segments * (u16 symbol, u8 bits)
//           leaf:     u8 overflow | u64 entries | entries * (u32 id, segments * u16)
//           internal: u8 split segment | node | node

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include "dsidx/core/params.hpp"
#include "dsidx/error.hpp"
#include "dsidx/index/node.hpp"
#include "dsidx/index/tree.hpp"
#include "dsidx/io/binary.hpp"

namespace dsidx::io {

inline constexpr char kIndexMagic[4] = {'D', 'S', 'X', 'T'};
inline constexpr std::uint32_t kIndexVersion = 1;

struct IndexFileMeta {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline void write_node(std::vector<char>& out, const Node& node) {
  put_le<std::uint8_t>(out, node.is_leaf() ? 0 : 1);
  for (const auto& s : node.summary.segments) {
    put_le<std::uint16_t>(out, s.symbol);
    put_le<std::uint8_t>(out, s.card_bits);
  }
  if (node.is_leaf()) {
    put_le<std::uint8_t>(out, node.overflow ? 1 : 0);
    put_le<std::uint64_t>(out, node.entries());
    for (std::size_t k = 0; k < node.entries(); ++k) {
      put_le<std::uint32_t>(out, node.ids[k]);
      for (Symbol s : node.word(k)) put_le<std::uint16_t>(out, s);
    }
  } else {
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(node.split_segment));
    write_node(out, *node.children[0]);
    write_node(out, *node.children[1]);
  }
}

inline std::unique_ptr<Node> read_node(ByteReader& r, const SummaryParams& params, unsigned depth) {
  if (depth > params.segments * params.max_card_bits + 1) {
    throw FormatError(FormatErrorKind::kBadStructure, r.offset(), "tree deeper than cardinality allows");
  }
  auto node = std::make_unique<Node>();
  const auto at = r.offset();
  const auto kind = r.read<std::uint8_t>("node kind");
  if (kind > 1) throw FormatError(FormatErrorKind::kBadStructure, at, "unknown node kind");
  node->summary.segments.resize(params.segments);
  for (auto& s : node->summary.segments) {
    s.symbol = r.read<std::uint16_t>("symbol");
    s.card_bits = r.read<std::uint8_t>("cardinality");
    if (s.card_bits < 1 || s.card_bits > params.max_card_bits ||
        s.symbol >= (1u << s.card_bits)) {
      throw FormatError(FormatErrorKind::kBadStructure, r.offset() - 3, "symbol outside cardinality");
    }
  }
  if (kind == 0) {
    node->overflow = r.read<std::uint8_t>("overflow flag") != 0;
    const auto entries = r.read<std::uint64_t>("entry count");
    const std::uint64_t entry_bytes = 4 + 2 * params.segments;
    if (entries > r.remaining() / entry_bytes) {
      throw FormatError(FormatErrorKind::kSizeMismatch, r.offset() - 8, "leaf entries exceed file size");
    }
    node->ids.resize(entries);
    node->words.resize(entries * params.segments);
    for (std::size_t k = 0; k < entries; ++k) {
      node->ids[k] = r.read<std::uint32_t>("series id");
      for (std::size_t i = 0; i < params.segments; ++i) {
        node->words[k * params.segments + i] = r.read<std::uint16_t>("word symbol");
      }
    }
    node->count = entries;
  } else {
    const auto seg_at = r.offset();
    const auto seg = r.read<std::uint8_t>("split segment");
    if (seg >= params.segments) throw FormatError(FormatErrorKind::kBadStructure, seg_at, "split segment out of range");
    node->split_segment = seg;
    node->children[0] = read_node(r, params, depth + 1);
    node->children[1] = read_node(r, params, depth + 1);
    for (unsigned b = 0; b < 2; ++b) {
      const auto& parent = node->summary.segments[seg];
      const auto& child = node->children[b]->summary.segments[seg];
      if (child.card_bits != parent.card_bits + 1 ||
          child.symbol != static_cast<Symbol>((parent.symbol << 1) | b)) {
        throw FormatError(FormatErrorKind::kBadStructure, seg_at, "child region does not refine parent");
      }
    }
    node->count = node->children[0]->count + node->children[1]->count;
  }
  return node;
}

}  // namespace detail

inline void save_index(const std::filesystem::path& path, const IndexTree& tree,
                       const IndexFileMeta& meta = {}) {
  const auto& p = tree.params();
  std::vector<char> out(kIndexMagic, kIndexMagic + 4);
  put_le<std::uint32_t>(out, kIndexVersion);
  put_le<std::uint64_t>(out, p.length);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.segments));
  put_le<std::uint32_t>(out, p.max_card_bits);
  put_le<std::uint64_t>(out, tree.leaf_capacity());
  put_le<std::uint64_t>(out, tree.size());
  put_le<std::uint64_t>(out, meta.config_hash);
  put_le<std::uint64_t>(out, meta.seed);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tree.root_children().size()));
  for (const auto& c : tree.root_children()) {
    put_le<std::uint32_t>(out, c.id);
    detail::write_node(out, *c.node);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError(FormatErrorKind::kIo, 0, "cannot open " + path.string() + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw FormatError(FormatErrorKind::kIo, 0, "write failed for " + path.string());
}

/// Checks that sampled entries lie in the region of every node on their
/// root-to-leaf path. Throws InvariantError naming the violation.
inline void check_path_containment(const IndexTree& tree, std::size_t max_samples) {
  const auto& p = tree.params();
  const std::size_t stride = std::max<std::size_t>(1, tree.size() / std::max<std::size_t>(max_samples, 1));
  std::size_t seen = 0;
  std::vector<const Node*> path;
  std::function<void(const Node&)> walk = [&](const Node& node) {
    path.push_back(&node);
    if (node.is_leaf()) {
      for (std::size_t k = 0; k < node.entries(); ++k, ++seen) {
        if (seen % stride != 0) continue;
        for (const Node* anc : path) {
          if (!anc->summary.contains(node.word(k), p.max_card_bits)) {
            throw InvariantError("path containment: series " + std::to_string(node.ids[k]) +
                                 " lies outside an ancestor's region");
          }
        }
      }
    } else {
      walk(*node.children[0]);
      walk(*node.children[1]);
    }
    path.pop_back();
  };
  for (const auto& c : tree.root_children()) {
    if (root_subtree_of(c.node->summary) != c.id) {
      throw InvariantError("path containment: root child " + std::to_string(c.id) +
                           " summary does not match its id");
    }
    walk(*c.node);
  }
}

inline IndexTree load_index(const std::filesystem::path& path, IndexFileMeta* meta = nullptr,
                            std::size_t containment_samples = 4096) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError(FormatErrorKind::kIo, 0, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kIndexMagic, 4) != 0) {
    throw FormatError(FormatErrorKind::kBadMagic, 0, "expected \"DSXT\"");
  }
  ByteReader r(bytes);
  r.read<std::uint32_t>("magic");
  const auto version = r.read<std::uint32_t>("version");
  if (version != kIndexVersion) {
    throw FormatError(FormatErrorKind::kBadVersion, 4, "index version " + std::to_string(version));
  }
  SummaryParams params;
  params.length = r.read<std::uint64_t>("length");
  params.segments = r.read<std::uint32_t>("segments");
  params.max_card_bits = r.read<std::uint32_t>("max_card_bits");
  try {
    params.validate();
  } catch (const InputError& e) {
    throw FormatError(FormatErrorKind::kBadStructure, 8, e.what());
  }
  const auto leaf_capacity = r.read<std::uint64_t>("leaf capacity");
  const auto count = r.read<std::uint64_t>("series count");
  IndexFileMeta m;
  m.config_hash = r.read<std::uint64_t>("config hash");
  m.seed = r.read<std::uint64_t>("seed");
  const auto roots = r.read<std::uint32_t>("root child count");
  std::vector<IndexTree::RootChild> children;
  for (std::uint32_t i = 0; i < roots; ++i) {
    const auto id = r.read<std::uint32_t>("subtree id");
    children.push_back({id, detail::read_node(r, params, 0)});
  }
  if (r.remaining() != 0) {
    throw FormatError(FormatErrorKind::kSizeMismatch, r.offset(), "trailing bytes after index");
  }
  IndexTree tree(params, leaf_capacity, std::move(children));
  if (tree.size() != count) {
    throw FormatError(FormatErrorKind::kBadStructure, 32,
                      "header declares " + std::to_string(count) + " series, tree holds " +
                          std::to_string(tree.size()));
  }
  check_path_containment(tree, containment_samples);
  if (meta) *meta = m;
  return tree;
}

}  // namespace dsidx::io
