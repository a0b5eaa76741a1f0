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

#include <concepts>
#include <span>
#include <string>
#include <vector>

#include "dsidx/core/params.hpp"
#include "dsidx/error.hpp"

namespace dsidx {

/// Piecewise aggregate approximation: one mean per segment.
struct PAASummary {
  std::vector<double> means;
};

/// Writes the segment means of `series` into `out` (size params.segments).
/// No validation; hot-path variant of compute_paa.
template <std::floating_point T>
void paa_into(std::span<const T> series, const SummaryParams& params, std::span<double> out) {
  const std::size_t seg_len = params.segment_length();
  const double inv = 1.0 / static_cast<double>(seg_len);
  for (std::size_t s = 0; s < params.segments; ++s) {
    double acc = 0.0;
    const T* p = series.data() + s * seg_len;
    for (std::size_t j = 0; j < seg_len; ++j) acc += static_cast<double>(p[j]);
    out[s] = acc * inv;
  }
}

template <std::floating_point T>
PAASummary compute_paa(std::span<const T> series, const SummaryParams& params) {
  params.validate();
  if (series.size() != params.length) {
    throw InputError("series length " + std::to_string(series.size()) +
                     " does not match configured length " + std::to_string(params.length));
  }
  PAASummary paa;
  paa.means.resize(params.segments);
  paa_into(series, params, std::span<double>(paa.means));
  return paa;
}

template <std::floating_point T>
PAASummary compute_paa(const std::vector<T>& series, const SummaryParams& params) {
  return compute_paa(std::span<const T>(series), params);
}

}  // namespace dsidx
