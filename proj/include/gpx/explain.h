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

// Local explanation of a black-box prediction: sample a noise set around the
// query point, label it with the black box, fit an interpretable surrogate on
// it and report how closely the surrogate follows the black box there.

#ifndef GPX_EXPLAIN_H_
#define GPX_EXPLAIN_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gpx/cart.h"
#include "gpx/expr.h"
#include "gpx/fidelity.h"
#include "gpx/gp.h"
#include "gpx/matrix.h"
#include "gpx/noise.h"
#include "gpx/oracle.h"
#include "json.hpp"

namespace gpx {

// Labels the samples with the oracle. Throws std::runtime_error if the oracle
// returns the wrong number of predictions or a non-finite one.
std::vector<double> LabelWithOracle(const Oracle& oracle, const Matrix& samples);

// u_r (with `metric`) for regression, u_c for classification.
double Fidelity(Task task, std::span<const double> pred_f,
                std::span<const double> pred_g,
                RegressionMetric metric = RegressionMetric::kMse);

class Explainer {
 public:
  virtual ~Explainer() = default;

  virtual std::string name() const = 0;

  // Fits a surrogate to (samples, labels) and returns its predictions on the
  // same samples. For classification the predictions are labels taken from
  // the distinct values of `labels`.
  virtual std::vector<double> FitPredict(const Matrix& samples,
                                         std::span<const double> labels,
                                         Task task,
                                         std::uint64_t seed) const = 0;
};

// Symbolic surrogate evolved by genetic programming. The GP seed is replaced
// by the seed passed to FitPredict. Classification fits the numeric labels and
// snaps the outputs to the nearest label.
class GpxExplainer : public Explainer {
 public:
  explicit GpxExplainer(GpConfig config = {}) : config_(config) {}
  std::string name() const override { return "gpx"; }
  std::vector<double> FitPredict(const Matrix& samples,
                                 std::span<const double> labels, Task task,
                                 std::uint64_t seed) const override;

 private:
  GpConfig config_;
};

// Ridge regression on the labels; classification snaps like GpxExplainer.
class LinearExplainer : public Explainer {
 public:
  explicit LinearExplainer(double lambda = 1.0) : lambda_(lambda) {}
  std::string name() const override { return "linear"; }
  std::vector<double> FitPredict(const Matrix& samples,
                                 std::span<const double> labels, Task task,
                                 std::uint64_t seed) const override;

 private:
  double lambda_;
};

// CART regression or classification tree.
class TreeExplainer : public Explainer {
 public:
  explicit TreeExplainer(CartOptions options = {}) : options_(options) {}
  std::string name() const override { return "tree"; }
  std::vector<double> FitPredict(const Matrix& samples,
                                 std::span<const double> labels, Task task,
                                 std::uint64_t seed) const override;

 private:
  CartOptions options_;
};

// Builds "gpx", "linear" or "tree". Throws std::invalid_argument otherwise.
std::unique_ptr<Explainer> MakeExplainer(const std::string& name,
                                         const GpConfig& gp = {},
                                         double lambda = 1.0,
                                         const CartOptions& tree = {});

struct ExplainOptions {
  GpConfig gp;
  std::size_t noise_size = 1000;
  RegressionMetric metric = RegressionMetric::kMse;
  // Seeds the noise set; the GP uses gp.seed.
  std::uint64_t seed = 0;
};

struct ExplanationReport {
  Task task = Task::kRegression;
  std::vector<double> query;
  std::vector<std::string> feature_names;
  ExprTree tree;
  std::string expression_infix;
  std::string expression_dot;
  std::vector<std::size_t> selected_features;
  double fidelity = 0.0;
  // "mse", "rmse" or "accuracy".
  std::string fidelity_metric;
  // Partial derivatives of the surrogate at the query point; zero for
  // features the expression does not use. Empty for classification.
  std::vector<double> gradient_at_x;
  double raw_fitness = 0.0;
  std::size_t generations_run = 0;
  ExplainOptions options;
  std::vector<double> sigma;
};

// Full pipeline for one query point `x`. Sigma is measured on `train`.
// Feature names default to "x<k>".
ExplanationReport ExplainGpx(const Oracle& oracle, std::span<const double> x,
                             const Matrix& train, const ExplainOptions& options,
                             std::span<const std::string> feature_names = {});

// Same, on a noise set that is already labelled.
ExplanationReport ExplainGpxOnNoise(const NoiseSet& noise,
                                    std::span<const double> labels, Task task,
                                    const ExplainOptions& options,
                                    std::span<const std::string> feature_names = {});

// Gradient of `tree` at `x`, zero for features the tree does not use.
std::vector<double> GradientAt(const ExprTree& tree, std::span<const double> x);

nlohmann::json GpConfigToJson(const GpConfig& config);
// Missing keys keep their defaults. Throws std::invalid_argument for unknown
// keys or values of the wrong type.
GpConfig GpConfigFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const ExplanationReport& report);

}  // namespace gpx

#endif  // GPX_EXPLAIN_H_
