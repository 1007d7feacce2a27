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

// Paired permutation test and Bonferroni adjustment.

#ifndef GPX_STATS_H_
#define GPX_STATS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gpx {

struct PermutationResult {
  // Mean of the paired differences a - b.
  double statistic = 0.0;
  // Two-sided.
  double p_value = 1.0;
  // True when all 2^n sign patterns were enumerated.
  bool exhaustive = false;
};

// Sign-flip test of mean(a - b) = 0. When 2^n <= n_perm every sign pattern is
// enumerated and p is the exact fraction of patterns whose |mean| reaches the
// observed one. Otherwise n_perm random patterns are drawn and
// p = (1 + hits) / (1 + n_perm). Throws std::invalid_argument on empty or
// mismatched inputs or n_perm = 0.
PermutationResult PairwisePermutationTest(std::span<const double> a,
                                          std::span<const double> b,
                                          std::size_t n_perm = 10000,
                                          std::uint64_t seed = 0);

// min(1, m * p) for each of the m p-values. Throws std::invalid_argument for
// p outside (0, 1].
std::vector<double> BonferroniAdjust(std::span<const double> p_values);

double Mean(std::span<const double> v);
// Sample standard deviation (denominator n - 1); 0 for fewer than 2 values.
double SampleStdDev(std::span<const double> v);
double Median(std::vector<double> v);

}  // namespace gpx

#endif  // GPX_STATS_H_
