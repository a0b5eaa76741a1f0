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

// DSIX dataset files: a 24-byte little-endian header followed by
// count * length 32-bit little-endian floats, row major.
//
//   offset  size  field
//        0     4  magic "DSIX"
//        4     4  format version (1)
//        8     8  series count
//       16     4  series length
//       20     4  flags (bit 0: z-normalized)

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dsidx/core/dataset.hpp"
#include "dsidx/error.hpp"
#include "dsidx/io/binary.hpp"

namespace dsidx::io {

inline constexpr char kDsixMagic[4] = {'D', 'S', 'I', 'X'};
inline constexpr std::uint32_t kDsixVersion = 1;
inline constexpr std::size_t kDsixHeaderSize = 24;
inline constexpr std::uint32_t kDsixKnownFlags = kFlagNormalized;

struct DsixHeader {
  std::uint32_t version = kDsixVersion;
  std::uint64_t count = 0;
  std::uint32_t length = 0;
  std::uint32_t flags = 0;

  std::uint64_t data_bytes() const noexcept { return count * length * sizeof(float); }
};

inline std::vector<char> encode_header(const DsixHeader& h) {
  std::vector<char> out(kDsixMagic, kDsixMagic + 4);
  put_le(out, h.version);
  put_le(out, h.count);
  put_le(out, h.length);
  put_le(out, h.flags);
  return out;
}

/// Parses and validates a header. `file_size` is checked against the
/// declared shape.
inline DsixHeader decode_header(const unsigned char* bytes, std::size_t available,
                                std::uint64_t file_size) {
  if (available < kDsixHeaderSize) {
    throw FormatError(FormatErrorKind::kTruncatedHeader, available,
                      "expected a " + std::to_string(kDsixHeaderSize) + "-byte header, file has " +
                          std::to_string(file_size) + " bytes");
  }
  if (std::memcmp(bytes, kDsixMagic, 4) != 0) {
    throw FormatError(FormatErrorKind::kBadMagic, 0, "expected \"DSIX\"");
  }
  DsixHeader h;
  h.version = get_le<std::uint32_t>(bytes + 4);
  h.count = get_le<std::uint64_t>(bytes + 8);
  h.length = get_le<std::uint32_t>(bytes + 16);
  h.flags = get_le<std::uint32_t>(bytes + 20);
  if (h.version != kDsixVersion) {
    throw FormatError(FormatErrorKind::kBadVersion, 4,
                      "version " + std::to_string(h.version) + " (supported: 1)");
  }
  if (h.length == 0) throw FormatError(FormatErrorKind::kBadLength, 16, "series length is 0");
  if ((h.flags & ~kDsixKnownFlags) != 0) {
    throw FormatError(FormatErrorKind::kBadFlags, 20, "flags 0x" + [&] {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%x", h.flags);
      return std::string(buf);
    }());
  }
  if (h.count > (std::uint64_t{1} << 40) / h.length) {
    throw FormatError(FormatErrorKind::kSizeMismatch, 8,
                      "series count " + std::to_string(h.count) + " is implausibly large");
  }
  const std::uint64_t expected = kDsixHeaderSize + h.data_bytes();
  if (file_size != expected) {
    throw FormatError(FormatErrorKind::kSizeMismatch, file_size < expected ? file_size : expected,
                      "expected " + std::to_string(expected) + " bytes, file has " +
                          std::to_string(file_size));
  }
  return h;
}

inline void write_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  DsixHeader h;
  h.count = dataset.size();
  h.length = static_cast<std::uint32_t>(dataset.length());
  h.flags = dataset.flags();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatErrorKind::kIo, 0, "cannot open " + path.string() + " for writing");
  const auto header = encode_header(h);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(dataset.values().data()),
              static_cast<std::streamsize>(dataset.values().size() * sizeof(float)));
  } else {
    std::vector<float> copy = dataset.values();
    floats_host_to_le(copy.data(), copy.size());
    out.write(reinterpret_cast<const char*>(copy.data()),
              static_cast<std::streamsize>(copy.size() * sizeof(float)));
  }
  out.flush();
  if (!out) {
    throw FormatError(FormatErrorKind::kIo, static_cast<std::uint64_t>(out.tellp()),
                      "write failed for " + path.string());
  }
}

/// Opens a DSIX file and validates its header; the stream is left
/// positioned at the first value.
inline DsixHeader open_dataset(const std::filesystem::path& path, std::ifstream& in) {
  in.open(path, std::ios::binary);
  if (!in) throw FormatError(FormatErrorKind::kIo, 0, "cannot open " + path.string());
  std::error_code ec;
  const auto file_size = std::filesystem::file_size(path, ec);
  if (ec) throw FormatError(FormatErrorKind::kIo, 0, "cannot stat " + path.string());
  unsigned char header[kDsixHeaderSize];
  in.read(reinterpret_cast<char*>(header), kDsixHeaderSize);
  return decode_header(header, static_cast<std::size_t>(in.gcount()), file_size);
}

inline Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in;
  const DsixHeader h = open_dataset(path, in);
  std::vector<float> values(h.count * h.length);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(h.data_bytes()));
  if (static_cast<std::uint64_t>(in.gcount()) != h.data_bytes()) {
    throw FormatError(FormatErrorKind::kSizeMismatch,
                      kDsixHeaderSize + static_cast<std::uint64_t>(in.gcount()),
                      "short read from " + path.string());
  }
  floats_le_to_host(values.data(), values.size());
  return Dataset(h.length, std::move(values), h.flags);
}

}  // namespace dsidx::io
