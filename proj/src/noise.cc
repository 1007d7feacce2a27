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

#include "gpx/noise.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace gpx {

std::vector<double> MeasureSigma(const Matrix& train) {
  if (train.rows() < 2) {
    throw std::invalid_argument("insufficient training data for sigma");
  }
  const double k = static_cast<double>(train.rows());
  std::vector<double> sigma(train.cols());
  for (std::size_t j = 0; j < train.cols(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < train.rows(); ++i) mean += train(i, j);
    mean /= k;
    double ss = 0.0;
    for (std::size_t i = 0; i < train.rows(); ++i) {
      const double d = train(i, j) - mean;
      ss += d * d;
    }
    sigma[j] = std::max(kMinSigma, std::sqrt(ss / k));
  }
  return sigma;
}

NoiseSet GenerateNoiseSet(std::span<const double> x,
                          std::span<const double> sigma, std::size_t m,
                          Rng& rng) {
  if (m == 0) throw std::invalid_argument("noise set size must be >= 1");
  if (x.size() != sigma.size()) {
    throw std::invalid_argument("noise set: center and sigma differ in size");
  }
  for (const double s : sigma) {
    if (!(s >= kMinSigma) || !std::isfinite(s)) {
      throw std::invalid_argument("noise set: sigma below minimum");
    }
  }
  NoiseSet noise{{x.begin(), x.end()}, {sigma.begin(), sigma.end()},
                 Matrix(m, x.size(), 0.0)};
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      noise.samples(i, j) = x[j] + sigma[j] * normal(rng);
    }
  }
  return noise;
}

}  // namespace gpx
