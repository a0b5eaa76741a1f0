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

#include <cstddef>
#include <cstdint>
#include <string>

#include "dsidx/error.hpp"

namespace dsidx {

using SeriesId = std::uint32_t;
using SubtreeId = std::uint32_t;
using Symbol = std::uint16_t;

inline constexpr unsigned kMaxCardBitsLimit = 16;
// Root subtree ids pack one bit per segment.
inline constexpr std::size_t kMaxSegments = 32;

/// Shape of the iSAX summaries: series length, segment count and the number
/// of bits per symbol at maximum cardinality.
struct SummaryParams {
  std::size_t length = 256;
  std::size_t segments = 16;
  unsigned max_card_bits = 8;

  std::size_t segment_length() const noexcept { return length / segments; }

  void validate() const {
    if (segments < 1 || segments > kMaxSegments) {
      throw InputError("segment count must be in [1, " + std::to_string(kMaxSegments) +
                       "], got " + std::to_string(segments));
    }
    if (max_card_bits < 1 || max_card_bits > kMaxCardBitsLimit) {
      throw InputError("max_card_bits must be in [1, 16], got " + std::to_string(max_card_bits));
    }
    if (length < segments || length % segments != 0) {
      throw InputError("series length " + std::to_string(length) +
                       " must be a positive multiple of the segment count " +
                       std::to_string(segments));
    }
  }

  bool operator==(const SummaryParams&) const = default;
};

}  // namespace dsidx
