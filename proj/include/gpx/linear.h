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

// Ridge regression surrogate.

#ifndef GPX_LINEAR_H_
#define GPX_LINEAR_H_

#include <span>
#include <string>
#include <vector>

#include "gpx/matrix.h"

namespace gpx {

struct LinearModel {
  double intercept = 0.0;
  std::vector<double> coefficients;

  double Predict(std::span<const double> x) const;
  std::vector<double> PredictBatch(const Matrix& rows) const;
  // e.g. "1.000 + 3.000*x0 + (-2.000)*x1".
  std::string ToText(std::span<const std::string> feature_names = {}) const;
};

// Minimises ||Xw + b - y||^2 + lambda ||w||^2 with the features standardised
// internally and the intercept b unpenalised; coefficients are reported on the
// original feature scale. Features that are constant over the samples get
// coefficient 0. Throws std::invalid_argument "singular normal equations; use
// λ > 0" when lambda is 0 and the system is singular.
LinearModel FitLinearSurrogate(const Matrix& samples,
                               std::span<const double> targets, double lambda);

}  // namespace gpx

#endif  // GPX_LINEAR_H_
