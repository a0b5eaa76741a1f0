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

// Helpers shared by the test suites: independent oracles and fixtures.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "dsidx/dsidx.hpp"

namespace dsidx::testing {

/// Answer of the naive oracle: exhaustive scan in long double, two passes
/// (differences first, then a plain sum), lowest id on ties.
struct NaiveAnswer {
  SeriesId id = kNoSeries;
  double distance = 0.0;
};

inline long double naive_squared(std::span<const float> a, std::span<const float> b) {
  std::vector<long double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff[i] = static_cast<long double>(a[i]) - static_cast<long double>(b[i]);
  }
  long double sum = 0.0L;
  for (long double d : diff) sum += d * d;
  return sum;
}

inline NaiveAnswer naive_nn(const Dataset& data, std::span<const float> query) {
  NaiveAnswer best;
  long double best_sq = INFINITY;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const long double d = naive_squared(data[i], query);
    if (d < best_sq) {
      best_sq = d;
      best.id = static_cast<SeriesId>(i);
    }
  }
  best.distance = static_cast<double>(std::sqrt(best_sq));
  return best;
}

/// Relative comparison used by every exactness check.
inline bool close_rel(double a, double b, double rel = 1e-5) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Leaf region (as "symbol/bits" per segment) mapped to the sorted ids of
/// that leaf. Two trees have equal leaf contents iff these maps are equal.
using LeafContents = std::map<std::string, std::vector<SeriesId>>;

inline LeafContents leaf_contents(const IndexTree& tree) {
  LeafContents out;
  tree.for_each_leaf([&](const Node& leaf) {
    std::string key;
    for (const auto& s : leaf.summary.segments) {
      key += std::to_string(s.symbol) + "/" + std::to_string(s.card_bits) + " ";
    }
    std::vector<SeriesId> ids(leaf.ids.begin(), leaf.ids.end());
    std::sort(ids.begin(), ids.end());
    out.emplace(std::move(key), std::move(ids));
  });
  return out;
}

/// Gaussian noise series; not normalized.
inline Dataset gaussian_dataset(std::size_t count, std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<float> v(count * length);
  for (auto& x : v) x = static_cast<float>(nd(rng));
  return Dataset(length, std::move(v));
}

inline std::vector<float> gaussian_series(std::size_t length, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<float> v(length);
  for (auto& x : v) x = static_cast<float>(nd(rng));
  return v;
}

/// Per-test scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("dsidx-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace dsidx::testing
