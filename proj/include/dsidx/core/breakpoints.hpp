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
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "dsidx/core/params.hpp"
#include "dsidx/error.hpp"

namespace dsidx {

/// Inverse of the standard normal CDF. Acklam's rational approximation
/// followed by one Halley step against erfc, which brings the result to
/// within a few ulps for p in (0, 1).
inline double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("quantile probability must be in (0, 1)");
  // Evaluate the lower half only so that the result is exactly antisymmetric.
  if (p > 0.5) return -inverse_normal_cdf(1.0 - p);
  if (p == 0.5) return 0.0;

  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;

  double x;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

/// Standard-normal quantile thresholds for every cardinality up to a maximum.
///
/// The list for cardinality c holds the 2^c - 1 quantiles at i / 2^c. Lists
/// are sliced out of the maximum-cardinality list with a stride, so each list
/// is an exact subsequence of the next one. As a consequence the symbol of a
/// value at cardinality c equals its maximum-cardinality symbol shifted right
/// by (max - c) bits.
class BreakpointTable {
 public:
  explicit BreakpointTable(unsigned max_card_bits) : max_bits_(max_card_bits) {
    if (max_card_bits < 1 || max_card_bits > kMaxCardBitsLimit) {
      throw InputError("max_card_bits must be in [1, 16], got " + std::to_string(max_card_bits));
    }
    const std::size_t top = std::size_t{1} << max_bits_;
    std::vector<double> finest(top - 1);
    for (std::size_t i = 1; i < top; ++i) {
      finest[i - 1] = inverse_normal_cdf(static_cast<double>(i) / static_cast<double>(top));
    }
    constexpr double kInf = std::numeric_limits<double>::infinity();
    lower_.resize(max_bits_ + 1);
    upper_.resize(max_bits_ + 1);
    for (unsigned c = 1; c <= max_bits_; ++c) {
      const std::size_t regions = std::size_t{1} << c;
      const std::size_t stride = top / regions;
      auto& lo = lower_[c];
      auto& hi = upper_[c];
      lo.resize(regions);
      hi.resize(regions);
      lo[0] = -kInf;
      hi[regions - 1] = kInf;
      for (std::size_t k = 1; k < regions; ++k) {
        const double t = finest[k * stride - 1];
        lo[k] = t;
        hi[k - 1] = t;
      }
    }
  }

  unsigned max_card_bits() const noexcept { return max_bits_; }

  /// The 2^c - 1 sorted thresholds for cardinality c.
  std::span<const double> thresholds(unsigned card_bits) const {
    check_bits(card_bits);
    return std::span<const double>(lower_[card_bits]).subspan(1);
  }

  /// Per-symbol region bounds padded with -inf / +inf at the open ends.
  std::span<const double> lower_bounds(unsigned card_bits) const {
    check_bits(card_bits);
    return lower_[card_bits];
  }
  std::span<const double> upper_bounds(unsigned card_bits) const {
    check_bits(card_bits);
    return upper_[card_bits];
  }

  double lower(unsigned card_bits, Symbol s) const noexcept { return lower_[card_bits][s]; }
  double upper(unsigned card_bits, Symbol s) const noexcept { return upper_[card_bits][s]; }

  /// Region index of `value`: the number of thresholds <= value. A value on a
  /// threshold lands in the upper region.
  Symbol symbolize(double value, unsigned card_bits) const noexcept {
    const auto& lo = lower_[card_bits];
    return static_cast<Symbol>(std::upper_bound(lo.begin() + 1, lo.end(), value) - lo.begin() - 1);
  }

  /// Process-wide table for a given maximum cardinality, built on first use.
  static const BreakpointTable& shared(unsigned max_card_bits) {
    if (max_card_bits < 1 || max_card_bits > kMaxCardBitsLimit) {
      throw InputError("max_card_bits must be in [1, 16], got " + std::to_string(max_card_bits));
    }
    static std::array<std::once_flag, kMaxCardBitsLimit + 1> once;
    static std::array<std::unique_ptr<BreakpointTable>, kMaxCardBitsLimit + 1> tables;
    std::call_once(once[max_card_bits], [&] {
      tables[max_card_bits] = std::make_unique<BreakpointTable>(max_card_bits);
    });
    return *tables[max_card_bits];
  }

 private:
  void check_bits(unsigned card_bits) const {
    if (card_bits < 1 || card_bits > max_bits_) {
      throw InputError("card_bits must be in [1, " + std::to_string(max_bits_) + "], got " +
                       std::to_string(card_bits));
    }
  }

  unsigned max_bits_;
  std::vector<std::vector<double>> lower_;
  std::vector<std::vector<double>> upper_;
};

/// Sorted standard-normal thresholds for `card_bits` bits of cardinality.
inline std::vector<double> breakpoints(unsigned card_bits) {
  if (card_bits < 1 || card_bits > kMaxCardBitsLimit) {
    throw InputError("card_bits must be in [1, 16], got " + std::to_string(card_bits));
  }
  auto t = BreakpointTable::shared(kMaxCardBitsLimit).thresholds(kMaxCardBitsLimit);
  const std::size_t stride = std::size_t{1} << (kMaxCardBitsLimit - card_bits);
  std::vector<double> out;
  out.reserve((std::size_t{1} << card_bits) - 1);
  for (std::size_t k = 1; k < (std::size_t{1} << card_bits); ++k) out.push_back(t[k * stride - 1]);
  return out;
}

}  // namespace dsidx
