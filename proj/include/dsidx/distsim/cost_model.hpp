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
#include <cstddef>
#include <set>
#include <span>
#include <vector>

#include "dsidx/distsim/job.hpp"

namespace dsidx::distsim {

inline constexpr double kMinPredictedCost = 1e-6;
inline constexpr std::size_t kMinWarmupSamples = 10;

struct WarmupSample {
  double initial_bsf = 0.0;
  double partition_size = 0.0;
  double cost = 0.0;
};

/// cost ~= intercept + bsf_coef * initial_bsf + size_coef * partition_size
struct CostModel {
  double intercept = 0.0;
  double bsf_coef = 0.0;
  double size_coef = 0.0;
  double residual_rms = 0.0;
  std::size_t samples = 0;
  // Set when the warmup could not support a fit and the model predicts the
  // mean cost.
  bool fallback = false;

  /// Always positive.
  double predict(double initial_bsf, double partition_size) const noexcept {
    return std::max(intercept + bsf_coef * initial_bsf + size_coef * partition_size,
                    kMinPredictedCost);
  }
  double predict(const QueryJob& job) const noexcept {
    return predict(job.initial_bsf, job.partition_size);
  }
};

/// Least-squares fit on centered features. A feature with no spread (or
/// collinear with initial_bsf) is dropped; fewer than 10 samples or fewer
/// than two distinct initial_bsf values give the flagged mean model.
inline CostModel calibrate(std::span<const WarmupSample> warmup) {
  CostModel m;
  m.samples = warmup.size();
  if (warmup.empty()) {
    m.fallback = true;
    return m;
  }
  const double n = static_cast<double>(warmup.size());
  double mx1 = 0, mx2 = 0, my = 0;
  std::set<double> distinct;
  for (const auto& s : warmup) {
    mx1 += s.initial_bsf;
    mx2 += s.partition_size;
    my += s.cost;
    distinct.insert(s.initial_bsf);
  }
  mx1 /= n;
  mx2 /= n;
  my /= n;

  double s11 = 0, s12 = 0, s22 = 0, s1y = 0, s2y = 0, syy = 0;
  for (const auto& s : warmup) {
    const double x1 = s.initial_bsf - mx1;
    const double x2 = s.partition_size - mx2;
    const double y = s.cost - my;
    s11 += x1 * x1;
    s12 += x1 * x2;
    s22 += x2 * x2;
    s1y += x1 * y;
    s2y += x2 * y;
    syy += y * y;
  }

  auto finish = [&] {
    double rss = 0;
    for (const auto& s : warmup) {
      const double r = s.cost - (m.intercept + m.bsf_coef * s.initial_bsf +
                                 m.size_coef * s.partition_size);
      rss += r * r;
    }
    m.residual_rms = std::sqrt(rss / n);
    return m;
  };

  m.intercept = my;
  if (warmup.size() < kMinWarmupSamples || distinct.size() < 2 || !(s11 > 0.0)) {
    m.fallback = true;
    return finish();
  }
  if (syy == 0.0) return finish();  // constant cost: mean model, nothing to fit

  const bool size_varies = s22 > 1e-12 * (1.0 + mx2 * mx2) * n;
  const double det = s11 * s22 - s12 * s12;
  if (size_varies && det > 1e-10 * s11 * s22) {
    m.bsf_coef = (s22 * s1y - s12 * s2y) / det;
    m.size_coef = (s11 * s2y - s12 * s1y) / det;
  } else {
    m.bsf_coef = s1y / s11;
  }
  m.intercept = my - m.bsf_coef * mx1 - m.size_coef * mx2;
  return finish();
}

/// Fit on jobs that carry a measured cost.
inline CostModel calibrate(std::span<const QueryJob> jobs) {
  std::vector<WarmupSample> samples;
  for (const auto& j : jobs) {
    if (j.measured_cost) samples.push_back({j.initial_bsf, j.partition_size, *j.measured_cost});
  }
  return calibrate(std::span<const WarmupSample>(samples));
}

}  // namespace dsidx::distsim
