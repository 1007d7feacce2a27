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

#include "gpx/kernel_ridge.h"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace gpx {
namespace {

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    d += t * t;
  }
  return d;
}

}  // namespace

std::vector<double> RbfModel::PredictBatch(const Matrix& rows) const {
  CheckOracleInput(*this, rows);
  std::vector<double> out(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    double v = y_mean_;
    for (std::size_t i = 0; i < train_.rows(); ++i) {
      v += alpha_[i] * std::exp(-gamma_ * SquaredDistance(rows.row(r), train_.row(i)));
    }
    if (task_ == Task::kClassification) v = v >= 0.5 ? 1.0 : 0.0;
    out[r] = v;
  }
  return out;
}

RbfModel TrainRbfModel(const Dataset& data, double gamma, double lambda) {
  data.Validate();
  if (!(gamma > 0.0)) throw std::invalid_argument("rbf gamma must be > 0");
  if (!(lambda >= 0.0)) throw std::invalid_argument("rbf lambda must be >= 0");
  if (data.task == Task::kClassification) {
    for (const double y : data.y) {
      if (y != 0.0 && y != 1.0) {
        throw std::invalid_argument("rbf classification needs labels in {0, 1}");
      }
    }
  }
  const std::size_t k = data.size();
  RbfModel model;
  model.task_ = data.task;
  model.train_ = data.x;
  model.gamma_ = gamma;
  for (const double y : data.y) model.y_mean_ += y;
  model.y_mean_ /= static_cast<double>(k);

  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd gram(kk, kk);
  Eigen::VectorXd rhs(kk);
  for (Eigen::Index i = 0; i < kk; ++i) {
    const auto ri = data.x.row(static_cast<std::size_t>(i));
    rhs(i) = data.y[static_cast<std::size_t>(i)] - model.y_mean_;
    gram(i, i) = 1.0 + lambda;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = std::exp(
          -gamma * SquaredDistance(ri, data.x.row(static_cast<std::size_t>(j))));
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-12) {
    throw std::invalid_argument("singular kernel system; use λ > 0");
  }
  const Eigen::VectorXd alpha = llt.solve(rhs);
  model.alpha_.assign(alpha.data(), alpha.data() + alpha.size());
  return model;
}

double ScaleGamma(const Matrix& x) {
  const std::size_t n = x.cols();
  if (n == 0 || x.rows() == 0) return 1.0;
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) mean += x(i, j);
    mean /= static_cast<double>(x.rows());
    double ss = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) ss += (x(i, j) - mean) * (x(i, j) - mean);
    total += ss / static_cast<double>(x.rows());
  }
  const double mean_var = total / static_cast<double>(n);
  return mean_var > 0.0 ? 1.0 / (static_cast<double>(n) * mean_var)
                        : 1.0 / static_cast<double>(n);
}

}  // namespace gpx
