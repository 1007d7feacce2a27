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

#include "gpx/synthetic.h"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "gpx/random.h"

namespace gpx {

std::vector<BlobParams> DefaultBlobs() {
  return {{{-6.0, 2.0}, 1.0}, {{0.0, -4.0}, 2.5}, {{5.0, 5.0}, 0.5}};
}

Dataset MakeBlobs(std::size_t n_samples, std::uint64_t seed,
                  const std::vector<BlobParams>& blobs) {
  if (blobs.empty()) throw std::invalid_argument("no blobs");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset data{"blobs", Matrix(0, 2, 0.0), {}, DefaultFeatureNames(2),
               Task::kClassification};
  for (std::size_t b = 0; b < blobs.size(); ++b) {
    const std::size_t count =
        n_samples / blobs.size() + (b < n_samples % blobs.size() ? 1 : 0);
    for (std::size_t i = 0; i < count; ++i) {
      const double row[2] = {blobs[b].center[0] + blobs[b].stddev * normal(rng),
                             blobs[b].center[1] + blobs[b].stddev * normal(rng)};
      data.x.AppendRow(row);
      data.y.push_back(static_cast<double>(b));
    }
  }
  return data;
}

Dataset MakeFriedman(std::size_t n_samples, std::uint64_t seed, double noise) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset data{"friedman", Matrix(n_samples, 5, 0.0), {}, DefaultFeatureNames(5),
               Task::kRegression};
  for (std::size_t i = 0; i < n_samples; ++i) {
    auto x = data.x.row(i);
    for (double& v : x) v = Uniform01(rng);
    data.y.push_back(10.0 * std::sin(std::numbers::pi * x[0] * x[1]) +
                     20.0 * (x[2] - 0.5) * (x[2] - 0.5) + 10.0 * x[3] +
                     5.0 * x[4] + noise * normal(rng));
  }
  return data;
}

Dataset MakeXor(std::size_t n_samples, std::uint64_t seed) {
  Rng rng(seed);
  Dataset data{"xor", Matrix(n_samples, 2, 0.0), {}, DefaultFeatureNames(2),
               Task::kClassification};
  for (std::size_t i = 0; i < n_samples; ++i) {
    auto x = data.x.row(i);
    x[0] = UniformReal(rng, -1.0, 1.0);
    x[1] = UniformReal(rng, -1.0, 1.0);
    data.y.push_back((x[0] > 0) != (x[1] > 0) ? 1.0 : 0.0);
  }
  return data;
}

Dataset MakeCircles(std::size_t n_samples, std::uint64_t seed, double noise,
                    double factor) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset data{"circles", Matrix(n_samples, 2, 0.0), {}, DefaultFeatureNames(2),
               Task::kClassification};
  for (std::size_t i = 0; i < n_samples; ++i) {
    const bool inner = i % 2 == 1;
    const double angle = UniformReal(rng, 0.0, 2.0 * std::numbers::pi);
    const double radius = inner ? factor : 1.0;
    auto x = data.x.row(i);
    x[0] = radius * std::cos(angle) + noise * normal(rng);
    x[1] = radius * std::sin(angle) + noise * normal(rng);
    data.y.push_back(inner ? 1.0 : 0.0);
  }
  return data;
}

Dataset MakeSynthetic(const std::string& name, std::size_t n_samples,
                      std::uint64_t seed) {
  if (name == "blobs") return MakeBlobs(n_samples, seed);
  if (name == "friedman") return MakeFriedman(n_samples, seed);
  if (name == "xor") return MakeXor(n_samples, seed);
  if (name == "circles") return MakeCircles(n_samples, seed);
  throw std::invalid_argument("unknown generator: " + name);
}

}  // namespace gpx
