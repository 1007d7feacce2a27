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

// Kernel ridge regression with the RBF kernel k(a, b) = exp(-gamma |a - b|^2),
// standing in for a support vector machine.

#ifndef GPX_KERNEL_RIDGE_H_
#define GPX_KERNEL_RIDGE_H_

#include <cstddef>
#include <vector>

#include "gpx/dataset.h"
#include "gpx/oracle.h"

namespace gpx {

class RbfModel : public Oracle {
 public:
  Task task() const override { return task_; }
  std::size_t num_features() const override { return train_.cols(); }
  // Regression output y_mean + sum_i alpha_i k(x, x_i); classification maps
  // outputs >= 0.5 to 1 and the rest to 0.
  std::vector<double> PredictBatch(const Matrix& rows) const override;

  double gamma() const { return gamma_; }

 private:
  friend RbfModel TrainRbfModel(const Dataset&, double, double);

  Task task_ = Task::kRegression;
  Matrix train_;
  std::vector<double> alpha_;
  double y_mean_ = 0.0;
  double gamma_ = 1.0;
};

// Solves (K + lambda I) alpha = y - mean(y). Classification requires labels
// in {0, 1}. Throws std::invalid_argument for gamma <= 0, lambda < 0, empty
// data, or "singular kernel system; use λ > 0".
RbfModel TrainRbfModel(const Dataset& data, double gamma, double lambda);

// 1 / (n * mean feature variance), or 1 / n when every feature is constant.
double ScaleGamma(const Matrix& x);

}  // namespace gpx

#endif  // GPX_KERNEL_RIDGE_H_
