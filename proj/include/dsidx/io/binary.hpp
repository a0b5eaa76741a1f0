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

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <type_traits>
#include <vector>

#include "dsidx/error.hpp"

namespace dsidx::io {

// Little-endian encode/decode helpers for the on-disk formats.

template <class T>
  requires std::is_integral_v<T>
void put_le(std::vector<char>& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>(u & 0xffu));
    u = static_cast<U>(u >> 8);
  }
}

template <class T>
  requires std::is_integral_v<T>
T get_le(const unsigned char* p) {
  using U = std::make_unsigned_t<T>;
  U u = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) u = static_cast<U>((u << 8) | p[i]);
  return static_cast<T>(u);
}

/// Converts floats between host order and little endian in place.
inline void floats_host_to_le(float* data, std::size_t n) {
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < n; ++i) {
      auto u = std::bit_cast<std::uint32_t>(data[i]);
      u = (u >> 24) | ((u >> 8) & 0xff00u) | ((u << 8) & 0xff0000u) | (u << 24);
      data[i] = std::bit_cast<float>(u);
    }
  } else {
    (void)data;
    (void)n;
  }
}

inline void floats_le_to_host(float* data, std::size_t n) { floats_host_to_le(data, n); }

/// Sequential reader over an in-memory byte buffer that reports offsets.
class ByteReader {
 public:
  ByteReader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

  template <class T>
  T read(const char* what) {
    if (pos_ + sizeof(T) > bytes_.size()) {
      throw FormatError(FormatErrorKind::kSizeMismatch, pos_,
                        std::string("file ends while reading ") + what);
    }
    T v = get_le<T>(bytes_.data() + pos_);
    pos_ += sizeof(T);
    return v;
  }

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace dsidx::io
