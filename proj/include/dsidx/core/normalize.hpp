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
#include <concepts>
#include <span>
#include <vector>

#include "dsidx/error.hpp"

namespace dsidx {

template <std::floating_point T>
struct Normalized {
  std::vector<T> values;
  // Set when the input had zero spread; values are then all zero.
  bool degenerate = false;
};

/// Z-normalization: subtract the mean, divide by the population standard
/// deviation. Moments are computed in double regardless of T.
template <std::floating_point T>
Normalized<T> znormalize(std::span<const T> series) {
  if (series.empty()) throw InputError("cannot normalize an empty series");
  double sum = 0.0;
  for (T v : series) {
    if (!std::isfinite(v)) throw InputError("series contains a non-finite value");
    sum += static_cast<double>(v);
  }
  const double n = static_cast<double>(series.size());
  const double mean = sum / n;
  double sq = 0.0;
  for (T v : series) {
    const double d = static_cast<double>(v) - mean;
    sq += d * d;
  }
  const double sd = std::sqrt(sq / n);

  Normalized<T> out;
  out.values.resize(series.size());
  if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    out.values[i] = static_cast<T>((static_cast<double>(series[i]) - mean) / sd);
  }
  return out;
}

template <std::floating_point T>
Normalized<T> znormalize(const std::vector<T>& series) {
  return znormalize(std::span<const T>(series));
}

}  // namespace dsidx
