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

#include "gpx/fidelity.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gpx {
namespace {

void CheckLengths(std::span<const double> f, std::span<const double> g) {
  if (f.empty()) throw std::invalid_argument("fidelity of empty predictions");
  if (f.size() != g.size()) {
    throw std::invalid_argument("fidelity: prediction lengths differ (" +
                                std::to_string(f.size()) + " vs " +
                                std::to_string(g.size()) + ")");
  }
}

}  // namespace

const char* MetricName(RegressionMetric metric) {
  return metric == RegressionMetric::kMse ? "mse" : "rmse";
}

RegressionMetric ParseMetric(const std::string& text) {
  if (text == "mse") return RegressionMetric::kMse;
  if (text == "rmse") return RegressionMetric::kRmse;
  throw std::invalid_argument("unknown regression metric: " + text);
}

double FidelityRegression(std::span<const double> pred_f,
                          std::span<const double> pred_g,
                          RegressionMetric metric) {
  CheckLengths(pred_f, pred_g);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred_f.size(); ++i) {
    const double d = pred_f[i] - pred_g[i];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(pred_f.size());
  return metric == RegressionMetric::kMse ? mse : std::sqrt(mse);
}

double FidelityClassification(std::span<const double> pred_f,
                              std::span<const double> pred_g) {
  CheckLengths(pred_f, pred_g);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < pred_f.size(); ++i) {
    if (pred_f[i] == pred_g[i]) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(pred_f.size());
}

std::vector<double> DistinctLabels(std::span<const double> labels) {
  std::vector<double> out(labels.begin(), labels.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> SnapToLabels(std::span<const double> values,
                                 std::span<const double> labels) {
  if (labels.empty()) throw std::invalid_argument("no labels to snap to");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    const auto hi = std::lower_bound(labels.begin(), labels.end(), v);
    if (hi == labels.begin()) {
      out[i] = labels.front();
    } else if (hi == labels.end()) {
      out[i] = labels.back();
    } else {
      const double upper = *hi;
      const double lower = *(hi - 1);
      out[i] = v - lower >= upper - v ? upper : lower;
    }
  }
  return out;
}

}  // namespace gpx
