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
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dsidx/core/params.hpp"
#include "dsidx/error.hpp"

namespace dsidx {

inline constexpr std::uint32_t kFlagNormalized = 1u;

/// Row-major collection of equal-length series stored as 32-bit floats.
/// Series are addressed by their position, which is also their id.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::size_t length) : length_(length) {}
  Dataset(std::size_t length, std::vector<float> values, std::uint32_t flags = 0)
      : length_(length), values_(std::move(values)), flags_(flags) {
    if (length_ == 0) throw InputError("series length must be positive");
    if (values_.size() % length_ != 0) {
      throw InputError("value count " + std::to_string(values_.size()) +
                       " is not a multiple of series length " + std::to_string(length_));
    }
  }

  std::size_t size() const noexcept { return length_ == 0 ? 0 : values_.size() / length_; }
  std::size_t length() const noexcept { return length_; }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const float> operator[](std::size_t i) const {
    return {values_.data() + i * length_, length_};
  }
  std::span<float> series(std::size_t i) { return {values_.data() + i * length_, length_}; }

  void append(std::span<const float> series) {
    if (series.size() != length_) {
      throw InputError("appended series has length " + std::to_string(series.size()) +
                       ", dataset length is " + std::to_string(length_));
    }
    values_.insert(values_.end(), series.begin(), series.end());
  }

  void resize(std::size_t count) { values_.resize(count * length_); }

  const std::vector<float>& values() const noexcept { return values_; }
  std::vector<float>& values() noexcept { return values_; }

  std::uint32_t flags() const noexcept { return flags_; }
  void set_flags(std::uint32_t flags) noexcept { flags_ = flags; }
  bool normalized() const noexcept { return (flags_ & kFlagNormalized) != 0; }

  /// Every series finite and of the shape `params` expects.
  void check_compatible(const SummaryParams& params) const {
    params.validate();
    if (empty()) throw InputError("dataset is empty");
    if (length_ != params.length) {
      throw InputError("dataset series length " + std::to_string(length_) +
                       " does not match summary length " + std::to_string(params.length));
    }
  }

 private:
  std::size_t length_ = 0;
  std::vector<float> values_;
  std::uint32_t flags_ = 0;
};

}  // namespace dsidx
