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

#include "gpx/linear.h"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "gpx/expr.h"

namespace gpx {

double LinearModel::Predict(std::span<const double> x) const {
  double out = intercept;
  for (std::size_t j = 0; j < coefficients.size(); ++j) {
    out += coefficients[j] * x[j];
  }
  return out;
}

std::vector<double> LinearModel::PredictBatch(const Matrix& rows) const {
  std::vector<double> out(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) out[r] = Predict(rows.row(r));
  return out;
}

std::string LinearModel::ToText(
    std::span<const std::string> feature_names) const {
  std::string out = FormatConstant(intercept);
  for (std::size_t j = 0; j < coefficients.size(); ++j) {
    if (coefficients[j] == 0.0) continue;
    const std::string name = j < feature_names.size()
                                 ? feature_names[j]
                                 : "x" + std::to_string(j);
    const std::string c = FormatConstant(coefficients[j]);
    out += " + " + (coefficients[j] < 0 ? "(" + c + ")" : c) + "*" + name;
  }
  return out;
}

LinearModel FitLinearSurrogate(const Matrix& samples,
                               std::span<const double> targets,
                               double lambda) {
  const std::size_t m = samples.rows();
  const std::size_t n = samples.cols();
  if (m == 0) throw std::invalid_argument("linear fit: no samples");
  if (targets.size() != m) {
    throw std::invalid_argument("linear fit: samples and targets differ in size");
  }
  if (!(lambda >= 0.0)) throw std::invalid_argument("linear fit: lambda < 0");

  const double md = static_cast<double>(m);
  double y_mean = 0.0;
  for (const double t : targets) y_mean += t;
  y_mean /= md;

  std::vector<double> mean(n, 0.0);
  std::vector<double> scale(n, 0.0);
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) mean[j] += samples(i, j);
    mean[j] /= md;
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = samples(i, j) - mean[j];
      ss += d * d;
    }
    scale[j] = std::sqrt(ss / md);
    if (scale[j] > 0.0) active.push_back(j);
  }

  LinearModel model;
  model.coefficients.assign(n, 0.0);
  model.intercept = y_mean;
  if (active.empty()) return model;

  const Eigen::Index p = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd z(static_cast<Eigen::Index>(m), p);
  Eigen::VectorXd y(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    y(r) = targets[i] - y_mean;
    for (Eigen::Index k = 0; k < p; ++k) {
      const std::size_t j = active[static_cast<std::size_t>(k)];
      z(r, k) = (samples(i, j) - mean[j]) / scale[j];
    }
  }
  Eigen::MatrixXd a = z.transpose() * z;
  a.diagonal().array() += lambda;
  const Eigen::VectorXd rhs = z.transpose() * y;
  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-12) {
    throw std::invalid_argument("singular normal equations; use λ > 0");
  }
  const Eigen::VectorXd w = llt.solve(rhs);
  for (Eigen::Index k = 0; k < p; ++k) {
    const std::size_t j = active[static_cast<std::size_t>(k)];
    model.coefficients[j] = w(k) / scale[j];
    model.intercept -= model.coefficients[j] * mean[j];
  }
  return model;
}

}  // namespace gpx
