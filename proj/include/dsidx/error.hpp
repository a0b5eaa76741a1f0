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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dsidx {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed arguments that violate an operation's preconditions.
class InputError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant did not hold. The message names the invariant.
class InvariantError : public Error {
 public:
  using Error::Error;
};

enum class FormatErrorKind {
  kTruncatedHeader,
  kBadMagic,
  kBadVersion,
  kBadLength,
  kBadFlags,
  kSizeMismatch,
  kBadStructure,
  kIo,
};

inline const char* to_string(FormatErrorKind kind) {
  switch (kind) {
    case FormatErrorKind::kTruncatedHeader: return "truncated header";
    case FormatErrorKind::kBadMagic: return "bad magic";
    case FormatErrorKind::kBadVersion: return "unsupported version";
    case FormatErrorKind::kBadLength: return "bad series length";
    case FormatErrorKind::kBadFlags: return "unknown flag bits";
    case FormatErrorKind::kSizeMismatch: return "size mismatch";
    case FormatErrorKind::kBadStructure: return "bad structure";
    case FormatErrorKind::kIo: return "i/o error";
  }
  return "format error";
}

/// Malformed or unreadable file. Carries the byte offset the problem was
/// detected at.
class FormatError : public Error {
 public:
  FormatError(FormatErrorKind kind, std::uint64_t offset, const std::string& detail)
      : Error(std::string(to_string(kind)) + " at byte offset " + std::to_string(offset) +
              ": " + detail),
        kind_(kind),
        offset_(offset) {}

  FormatErrorKind kind() const noexcept { return kind_; }
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  FormatErrorKind kind_;
  std::uint64_t offset_;
};

}  // namespace dsidx
