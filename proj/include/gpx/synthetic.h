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

// Bundled synthetic datasets.

#ifndef GPX_SYNTHETIC_H_
#define GPX_SYNTHETIC_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gpx/dataset.h"

namespace gpx {

struct BlobParams {
  std::array<double, 2> center;
  double stddev;
};

// Centers (-6, 2), (0, -4), (5, 5) with standard deviations 1.0, 2.5 and 0.5.
std::vector<BlobParams> DefaultBlobs();

// Isotropic Gaussian blobs in 2-D, labelled 0, 1, 2, ... by blob. Samples are
// split as evenly as possible, earlier blobs taking the remainder.
Dataset MakeBlobs(std::size_t n_samples, std::uint64_t seed,
                  const std::vector<BlobParams>& blobs = DefaultBlobs());

// Five features uniform in [0, 1] and
// y = 10 sin(pi x0 x1) + 20 (x2 - 0.5)^2 + 10 x3 + 5 x4 + N(0, noise^2).
Dataset MakeFriedman(std::size_t n_samples, std::uint64_t seed,
                     double noise = 0.5);

// Two features uniform in [-1, 1]; label 1 when exactly one is positive.
Dataset MakeXor(std::size_t n_samples, std::uint64_t seed);

// Two concentric noisy circles with radii 1 and `factor`; the inner circle is
// class 1.
Dataset MakeCircles(std::size_t n_samples, std::uint64_t seed,
                    double noise = 0.05, double factor = 0.5);

// "blobs", "friedman", "xor" or "circles" with default parameters.
Dataset MakeSynthetic(const std::string& name, std::size_t n_samples,
                      std::uint64_t seed);

}  // namespace gpx

#endif  // GPX_SYNTHETIC_H_
