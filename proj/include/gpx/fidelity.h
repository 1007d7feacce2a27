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

// Agreement between an explainer f and the black box g on a noise set.

#ifndef GPX_FIDELITY_H_
#define GPX_FIDELITY_H_

#include <span>
#include <string>
#include <vector>

namespace gpx {

enum class RegressionMetric { kMse, kRmse };

const char* MetricName(RegressionMetric metric);
// "mse" or "rmse".
RegressionMetric ParseMetric(const std::string& text);

// Mean of squared differences, or its square root for kRmse. Throws
// std::invalid_argument on empty or mismatched inputs.
double FidelityRegression(std::span<const double> pred_f,
                          std::span<const double> pred_g,
                          RegressionMetric metric = RegressionMetric::kMse);

// Fraction of positions where the labels are equal.
double FidelityClassification(std::span<const double> pred_f,
                              std::span<const double> pred_g);

// Sorted distinct values.
std::vector<double> DistinctLabels(std::span<const double> labels);

// Maps each value to the nearest entry of `labels` (sorted, non-empty). A value
// exactly halfway between two labels goes to the larger one, so with labels
// {0, 1} this is rounding at 0.5.
std::vector<double> SnapToLabels(std::span<const double> values,
                                 std::span<const double> labels);

}  // namespace gpx

#endif  // GPX_FIDELITY_H_
