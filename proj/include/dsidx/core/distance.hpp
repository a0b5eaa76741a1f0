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

#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <span>
#include <string>

#include "dsidx/error.hpp"

namespace dsidx {

namespace detail {

inline constexpr std::size_t kDistanceBlock = 16;
inline constexpr std::size_t kDistanceLanes = 8;

// Squared differences accumulate in T-precision lanes within a block of 16
// coordinates; block sums are reduced in double. The abandon check runs at
// block boundaries only, so a distance that is fully computed does not
// depend on the threshold it was computed against.
template <std::floating_point T>
double squared_distance_kernel(const T* a, const T* b, std::size_t n,
                               double abandon_above) noexcept {
  double total = 0.0;
  std::size_t i = 0;
  for (; i + kDistanceBlock <= n; i += kDistanceBlock) {
    T lanes[kDistanceLanes] = {};
    for (std::size_t j = 0; j < kDistanceBlock; ++j) {
      const T d = a[i + j] - b[i + j];
      lanes[j % kDistanceLanes] += d * d;
    }
    double block = 0.0;
    for (std::size_t l = 0; l < kDistanceLanes; ++l) block += static_cast<double>(lanes[l]);
    total += block;
    if (total > abandon_above) return total;
  }
  for (; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    total += d * d;
  }
  return total;
}

}  // namespace detail

/// Squared Euclidean distance. Returns early with a partial sum (which is
/// already > abandon_above) once the running sum exceeds abandon_above.
template <std::floating_point T>
double squared_euclidean(std::span<const T> a, std::span<const T> b,
                         double abandon_above = std::numeric_limits<double>::infinity()) {
  if (a.size() != b.size()) {
    throw InputError("distance between series of lengths " + std::to_string(a.size()) + " and " +
                     std::to_string(b.size()));
  }
  return detail::squared_distance_kernel(a.data(), b.data(), a.size(), abandon_above);
}

template <std::floating_point T>
double euclidean(std::span<const T> a, std::span<const T> b) {
  return std::sqrt(squared_euclidean(a, b));
}

}  // namespace dsidx
