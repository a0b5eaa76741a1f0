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

#include <chrono>
#include <span>
#include <string>
#include <vector>

#include "dsidx/core/breakpoints.hpp"
#include "dsidx/core/isax.hpp"
#include "dsidx/core/paa.hpp"
#include "dsidx/core/params.hpp"
#include "dsidx/error.hpp"

namespace dsidx {

/// A query series with its PAA and maximum-cardinality word precomputed.
struct PreparedQuery {
  std::vector<float> values;
  std::vector<double> paa;
  std::vector<Symbol> word;

  std::span<const float> series() const noexcept { return values; }
};

inline PreparedQuery prepare_query(std::span<const float> query, const SummaryParams& params,
                                   const BreakpointTable& table) {
  if (query.size() != params.length) {
    throw InputError("query length " + std::to_string(query.size()) +
                     " does not match index series length " + std::to_string(params.length));
  }
  PreparedQuery q;
  q.values.assign(query.begin(), query.end());
  q.paa.resize(params.segments);
  q.word.resize(params.segments);
  paa_into(query, params, std::span<double>(q.paa));
  symbolize_into(q.paa, params.max_card_bits, table, q.word);
  return q;
}

namespace detail {

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

}  // namespace dsidx
