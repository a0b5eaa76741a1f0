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

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dsidx/core/breakpoints.hpp"
#include "dsidx/core/paa.hpp"
#include "dsidx/core/params.hpp"
#include "dsidx/error.hpp"

namespace dsidx {

/// One segment of an iSAX word: a region index at a given number of bits.
struct SaxSymbol {
  Symbol symbol = 0;
  std::uint8_t card_bits = 1;

  auto operator<=>(const SaxSymbol&) const = default;
};

/// iSAX word with a per-segment cardinality. Also used as the region summary
/// of index nodes.
struct ISAXWord {
  std::vector<SaxSymbol> segments;

  std::size_t size() const noexcept { return segments.size(); }
  bool operator==(const ISAXWord&) const = default;

  /// True if a maximum-cardinality word lies inside this word's region.
  bool contains(std::span<const Symbol> max_word, unsigned max_card_bits) const noexcept {
    if (max_word.size() != segments.size()) return false;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const auto& s = segments[i];
      if ((max_word[i] >> (max_card_bits - s.card_bits)) != s.symbol) return false;
    }
    return true;
  }

  /// True if `inner`'s region is a subset of this word's region.
  bool contains(const ISAXWord& inner) const noexcept {
    if (inner.size() != size()) return false;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const auto& outer = segments[i];
      const auto& in = inner.segments[i];
      if (in.card_bits < outer.card_bits) return false;
      if ((in.symbol >> (in.card_bits - outer.card_bits)) != outer.symbol) return false;
    }
    return true;
  }
};

/// Builds a word from maximum-cardinality symbols, demoted to `card_bits`.
inline ISAXWord word_from_symbols(std::span<const Symbol> max_word, unsigned max_card_bits,
                                  unsigned card_bits) {
  ISAXWord w;
  w.segments.reserve(max_word.size());
  for (Symbol s : max_word) {
    w.segments.push_back({static_cast<Symbol>(s >> (max_card_bits - card_bits)),
                          static_cast<std::uint8_t>(card_bits)});
  }
  return w;
}

/// Symbolizes every segment mean at `card_bits` into `out`.
inline void symbolize_into(std::span<const double> paa, unsigned card_bits,
                           const BreakpointTable& table, std::span<Symbol> out) noexcept {
  for (std::size_t i = 0; i < paa.size(); ++i) out[i] = table.symbolize(paa[i], card_bits);
}

inline ISAXWord compute_isax(const PAASummary& paa, unsigned card_bits,
                             const BreakpointTable& table) {
  if (card_bits < 1 || card_bits > table.max_card_bits()) {
    throw InputError("card_bits must be in [1, " + std::to_string(table.max_card_bits()) +
                     "], got " + std::to_string(card_bits));
  }
  ISAXWord w;
  w.segments.reserve(paa.means.size());
  for (double m : paa.means) {
    w.segments.push_back({table.symbolize(m, card_bits), static_cast<std::uint8_t>(card_bits)});
  }
  return w;
}

}  // namespace dsidx
