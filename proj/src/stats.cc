/*
 * Copyright 2026 The GPX Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gpx/stats.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpx/random.h"

namespace gpx {

PermutationResult PairwisePermutationTest(std::span<const double> a,
                                          std::span<const double> b,
                                          std::size_t n_perm,
                                          std::uint64_t seed) {
  if (a.empty() || a.size() != b.size()) {
    throw std::invalid_argument("permutation test needs equal, non-empty samples");
  }
  if (n_perm == 0) throw std::invalid_argument("permutation test needs n_perm >= 1");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  double sum = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = a[i] - b[i];
    sum += d[i];
    scale += std::abs(d[i]);
  }
  const double nd = static_cast<double>(n);
  PermutationResult result;
  result.statistic = sum / nd;
  const double observed = std::abs(result.statistic);
  // Permuted means that differ from the observed one only by rounding count
  // as reaching it.
  const double tol = 1e-10 * scale / nd;
  auto reaches = [&](double s) { return std::abs(s / nd) >= observed - tol; };

  if (n < 63 && (std::uint64_t{1} << n) <= n_perm) {
    result.exhaustive = true;
    const std::uint64_t patterns = std::uint64_t{1} << n;
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += (mask >> i & 1) ? -d[i] : d[i];
      if (reaches(s)) ++hits;
    }
    result.p_value = static_cast<double>(hits) / static_cast<double>(patterns);
    return result;
  }
  Rng rng(seed);
  std::uint64_t hits = 0;
  for (std::size_t k = 0; k < n_perm; ++k) {
    double s = 0.0;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng();
      s += (bits & 1) ? -d[i] : d[i];
      bits >>= 1;
    }
    if (reaches(s)) ++hits;
  }
  result.p_value =
      static_cast<double>(1 + hits) / static_cast<double>(1 + n_perm);
  return result;
}

std::vector<double> BonferroniAdjust(std::span<const double> p_values) {
  const double m = static_cast<double>(p_values.size());
  std::vector<double> out;
  out.reserve(p_values.size());
  for (const double p : p_values) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw std::invalid_argument("p-value outside (0, 1]");
    }
    out.push_back(std::min(1.0, m * p));
  }
  return out;
}

double Mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double SampleStdDev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mean = Mean(v);
  double ss = 0.0;
  for (const double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double Median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : (v[h - 1] + v[h]) / 2.0;
}

}  // namespace gpx
