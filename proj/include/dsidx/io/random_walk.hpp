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
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dsidx/core/dataset.hpp"
#include "dsidx/core/normalize.hpp"
#include "dsidx/error.hpp"
#include "dsidx/io/dsix.hpp"

namespace dsidx::io {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Unit-normal variates from a fixed engine (mt19937_64, whose output the
/// standard pins down) through the Marsaglia polar method, so streams are
/// reproducible across standard libraries.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Substream seed for series `index` of a generation run.
inline std::uint64_t series_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(seed ^ splitmix64(index + 1));
}

inline void random_walk_into(std::uint64_t seed, std::uint64_t index, std::span<float> out) {
  NormalStream normal(series_seed(seed, index));
  std::vector<double> walk(out.size());
  double x = 0.0;
  for (double& v : walk) {
    x += normal.next();
    v = x;
  }
  const auto z = znormalize(std::span<const double>(walk));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(z.values[i]);
}

/// `count` z-normalized random walks of `length` points. Series i depends
/// only on (seed, i).
inline Dataset generate_random_walk(std::size_t count, std::size_t length, std::uint64_t seed) {
  if (count < 1 || length < 1) throw InputError("count and length must be at least 1");
  Dataset ds(length, std::vector<float>(count * length), kFlagNormalized);
  for (std::size_t i = 0; i < count; ++i) random_walk_into(seed, i, ds.series(i));
  return ds;
}

inline Dataset generate_random_walk(std::size_t count, std::size_t length, std::uint64_t seed,
                                    const std::filesystem::path& out_path) {
  Dataset ds = generate_random_walk(count, length, seed);
  write_dataset(out_path, ds);
  return ds;
}

/// Queries derived from dataset members: a seeded pick of a source series
/// plus Gaussian noise of standard deviation `noise`, re-normalized.
inline Dataset derive_queries(const Dataset& source, std::size_t count, double noise,
                              std::uint64_t seed) {
  if (source.empty()) throw InputError("cannot derive queries from an empty dataset");
  const std::size_t n = source.length();
  Dataset out(n, std::vector<float>(count * n), kFlagNormalized);
  std::vector<double> buf(n);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t s = series_seed(seed, i);
    const std::size_t pick = static_cast<std::size_t>(splitmix64(s) % source.size());
    NormalStream normal(s);
    const auto src = source[pick];
    for (std::size_t j = 0; j < n; ++j) buf[j] = static_cast<double>(src[j]) + noise * normal.next();
    const auto z = znormalize(std::span<const double>(buf));
    auto dst = out.series(i);
    for (std::size_t j = 0; j < n; ++j) dst[j] = static_cast<float>(z.values[j]);
  }
  return out;
}

}  // namespace dsidx::io
