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
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "dsidx/core/breakpoints.hpp"
#include "dsidx/core/isax.hpp"
#include "dsidx/core/paa.hpp"
#include "dsidx/core/params.hpp"
#include "dsidx/error.hpp"

namespace dsidx {

// Squared iSAX lower bound:  (n / w) * sum_i gap_i^2, where gap_i is the
// distance from the query's segment mean to the region of symbol i (zero
// inside the region). All the functions below evaluate the per-segment sum
// in segment order and multiply by n / w last, so the scalar and batched
// paths produce bit-identical values.

inline double mindist_scale(const SummaryParams& params) noexcept {
  return static_cast<double>(params.length) / static_cast<double>(params.segments);
}

/// Squared bound against a word with per-segment cardinalities.
inline double mindist_sq(std::span<const double> query_paa, const ISAXWord& word,
                         const SummaryParams& params, const BreakpointTable& table) {
  if (query_paa.size() != word.size() || word.size() != params.segments) {
    throw InputError("query PAA has " + std::to_string(query_paa.size()) + " segments, word has " +
                     std::to_string(word.size()) + ", params expect " +
                     std::to_string(params.segments));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    const auto [sym, bits] = word.segments[i];
    const double q = query_paa[i];
    const double lo = table.lower(bits, sym);
    const double hi = table.upper(bits, sym);
    double gap = 0.0;
    if (q < lo) {
      gap = lo - q;
    } else if (q > hi) {
      gap = q - hi;
    }
    acc += gap * gap;
  }
  return acc * mindist_scale(params);
}

inline double mindist(const PAASummary& query_paa, const ISAXWord& word,
                      const SummaryParams& params, const BreakpointTable& table) {
  return std::sqrt(mindist_sq(query_paa.means, word, params, table));
}

/// Squared bound against a word stored as bare symbols, all at `card_bits`.
inline double mindist_sq_symbols(std::span<const double> query_paa, std::span<const Symbol> word,
                                 unsigned card_bits, double scale,
                                 const BreakpointTable& table) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    const double q = query_paa[i];
    const double lo = table.lower(card_bits, word[i]);
    const double hi = table.upper(card_bits, word[i]);
    double gap = 0.0;
    if (q < lo) {
      gap = lo - q;
    } else if (q > hi) {
      gap = q - hi;
    }
    acc += gap * gap;
  }
  return acc * scale;
}

/// Branch-free bound kernel over a contiguous block of same-cardinality
/// words. The per-segment gap is max(0, lo[s] - q, q - hi[s]), looked up
/// from padded region tables, so the inner loop has no data-dependent
/// branches.
class BatchedLowerBound {
 public:
  BatchedLowerBound(std::span<const double> query_paa, unsigned card_bits,
                    const SummaryParams& params, const BreakpointTable& table)
      : paa_(query_paa.begin(), query_paa.end()),
        lo_(table.lower_bounds(card_bits)),
        hi_(table.upper_bounds(card_bits)),
        segments_(params.segments),
        scale_(mindist_scale(params)) {
    if (paa_.size() != segments_) {
      throw InputError("query PAA has " + std::to_string(paa_.size()) +
                       " segments, params expect " + std::to_string(segments_));
    }
  }

  std::size_t segments() const noexcept { return segments_; }

  /// Squared bounds of words.size() / segments() packed words.
  void squared(std::span<const Symbol> words, std::span<double> out) const noexcept {
    const std::size_t w = segments_;
    const std::size_t count = words.size() / w;
    const double* q = paa_.data();
    const double* lo = lo_.data();
    const double* hi = hi_.data();
    for (std::size_t k = 0; k < count; ++k) {
      const Symbol* word = words.data() + k * w;
      double acc = 0.0;
      for (std::size_t i = 0; i < w; ++i) {
        const Symbol s = word[i];
        const double gap = std::max(std::max(lo[s] - q[i], q[i] - hi[s]), 0.0);
        acc += gap * gap;
      }
      out[k] = acc * scale_;
    }
  }

 private:
  std::vector<double> paa_;
  std::span<const double> lo_;
  std::span<const double> hi_;
  std::size_t segments_;
  double scale_;
};

/// Rooted bounds for packed same-cardinality words.
inline std::vector<double> batched_mindist(const PAASummary& query_paa,
                                           std::span<const Symbol> words, unsigned card_bits,
                                           const SummaryParams& params,
                                           const BreakpointTable& table) {
  if (words.size() % params.segments != 0) {
    throw InputError("packed word array size is not a multiple of the segment count");
  }
  BatchedLowerBound kernel(query_paa.means, card_bits, params, table);
  std::vector<double> out(words.size() / params.segments);
  kernel.squared(words, out);
  for (double& v : out) v = std::sqrt(v);
  return out;
}

/// Rooted bounds for an array of words. Every segment of every word must
/// share one cardinality.
inline std::vector<double> batched_mindist(const PAASummary& query_paa,
                                           std::span<const ISAXWord> words,
                                           const SummaryParams& params,
                                           const BreakpointTable& table) {
  if (words.empty()) return {};
  const unsigned card = words.front().segments.empty() ? 0 : words.front().segments[0].card_bits;
  std::vector<Symbol> packed;
  packed.reserve(words.size() * params.segments);
  for (const auto& w : words) {
    if (w.size() != params.segments) {
      throw InputError("word has " + std::to_string(w.size()) + " segments, params expect " +
                       std::to_string(params.segments));
    }
    for (const auto& s : w.segments) {
      if (s.card_bits != card) {
        throw InputError("batched bounds need a single cardinality; found " +
                         std::to_string(card) + " and " + std::to_string(s.card_bits) + " bits");
      }
      packed.push_back(s.symbol);
    }
  }
  return batched_mindist(query_paa, packed, card, params, table);
}

}  // namespace dsidx
