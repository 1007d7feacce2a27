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

// Local noise set: Gaussian samples around a query point with per-feature
// scales measured on training data.

#ifndef GPX_NOISE_H_
#define GPX_NOISE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "gpx/matrix.h"
#include "gpx/random.h"

namespace gpx {

// Smallest per-feature scale; constant training columns are raised to it.
inline constexpr double kMinSigma = 1e-8;

struct NoiseSet {
  std::vector<double> center;
  std::vector<double> sigma;
  Matrix samples;

  std::size_t size() const { return samples.rows(); }
};

// Per-feature population standard deviation (denominator k), floored at
// kMinSigma. Throws std::invalid_argument "insufficient training data for
// sigma" for fewer than 2 rows.
std::vector<double> MeasureSigma(const Matrix& train);

// `m` rows with component j drawn from Normal(x[j], sigma[j]^2), row by row.
// Throws std::invalid_argument when m is 0, the sizes differ, or a sigma is
// below kMinSigma.
NoiseSet GenerateNoiseSet(std::span<const double> x,
                          std::span<const double> sigma, std::size_t m,
                          Rng& rng);

}  // namespace gpx

#endif  // GPX_NOISE_H_
