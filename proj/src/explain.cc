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

#include "gpx/explain.h"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "gpx/linear.h"

namespace gpx {
namespace {

std::vector<std::string> NamesFor(std::span<const std::string> names,
                                  std::size_t n) {
  if (names.empty()) {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < n; ++j) out.push_back("x" + std::to_string(j));
    return out;
  }
  if (names.size() != n) {
    throw std::invalid_argument("expected " + std::to_string(n) +
                                " feature names, got " +
                                std::to_string(names.size()));
  }
  return {names.begin(), names.end()};
}

std::vector<double> Snap(Task task, std::vector<double> predictions,
                         std::span<const double> labels) {
  if (task == Task::kRegression) return predictions;
  const std::vector<double> distinct = DistinctLabels(labels);
  return SnapToLabels(predictions, distinct);
}

template <typename T>
void Read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument(std::string("gp config: bad value for ") + key);
  }
}

}  // namespace

std::vector<double> LabelWithOracle(const Oracle& oracle,
                                    const Matrix& samples) {
  CheckOracleInput(oracle, samples);
  std::vector<double> labels = oracle.PredictBatch(samples);
  if (labels.size() != samples.rows()) {
    throw std::runtime_error("oracle returned " + std::to_string(labels.size()) +
                             " predictions for " +
                             std::to_string(samples.rows()) + " rows");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!std::isfinite(labels[i])) {
      throw std::runtime_error("oracle returned a non-finite prediction for row " +
                               std::to_string(i));
    }
  }
  return labels;
}

double Fidelity(Task task, std::span<const double> pred_f,
                std::span<const double> pred_g, RegressionMetric metric) {
  return task == Task::kRegression
             ? FidelityRegression(pred_f, pred_g, metric)
             : FidelityClassification(pred_f, pred_g);
}

std::vector<double> GpxExplainer::FitPredict(const Matrix& samples,
                                             std::span<const double> labels,
                                             Task task,
                                             std::uint64_t seed) const {
  GpConfig config = config_;
  config.seed = seed;
  const EvolveResult result = Evolve(config, samples, labels);
  return Snap(task, EvalBatch(result.best.tree, samples), labels);
}

std::vector<double> LinearExplainer::FitPredict(const Matrix& samples,
                                                std::span<const double> labels,
                                                Task task,
                                                std::uint64_t) const {
  const LinearModel model = FitLinearSurrogate(samples, labels, lambda_);
  return Snap(task, model.PredictBatch(samples), labels);
}

std::vector<double> TreeExplainer::FitPredict(const Matrix& samples,
                                              std::span<const double> labels,
                                              Task task,
                                              std::uint64_t) const {
  return FitDecisionTree(samples, labels, task, options_).PredictBatch(samples);
}

std::unique_ptr<Explainer> MakeExplainer(const std::string& name,
                                         const GpConfig& gp, double lambda,
                                         const CartOptions& tree) {
  if (name == "gpx") return std::make_unique<GpxExplainer>(gp);
  if (name == "linear") return std::make_unique<LinearExplainer>(lambda);
  if (name == "tree") return std::make_unique<TreeExplainer>(tree);
  throw std::invalid_argument("unknown explainer: " + name);
}

std::vector<double> GradientAt(const ExprTree& tree, std::span<const double> x) {
  std::vector<double> gradient(x.size(), 0.0);
  for (const std::size_t j : tree.Variables()) {
    if (j >= x.size()) throw std::out_of_range("tree uses a missing feature");
    gradient[j] = Eval(Differentiate(tree, j), x);
  }
  return gradient;
}

ExplanationReport ExplainGpxOnNoise(const NoiseSet& noise,
                                    std::span<const double> labels, Task task,
                                    const ExplainOptions& options,
                                    std::span<const std::string> feature_names) {
  const std::size_t n = noise.center.size();
  ExplanationReport report;
  report.task = task;
  report.query = noise.center;
  report.sigma = noise.sigma;
  report.feature_names = NamesFor(feature_names, n);
  report.options = options;
  report.options.noise_size = noise.size();

  const EvolveResult result = Evolve(options.gp, noise.samples, labels);
  report.tree = result.best.tree;
  report.raw_fitness = result.best.raw_fitness;
  report.generations_run = result.generations_run;
  report.expression_infix = ToInfix(report.tree, report.feature_names);
  report.expression_dot = ToDot(report.tree, report.feature_names);
  report.selected_features = report.tree.Variables();

  const std::vector<double> predictions =
      Snap(task, EvalBatch(report.tree, noise.samples), labels);
  report.fidelity = Fidelity(task, predictions, labels, options.metric);
  if (task == Task::kRegression) {
    report.fidelity_metric = MetricName(options.metric);
    report.gradient_at_x = GradientAt(report.tree, noise.center);
  } else {
    report.fidelity_metric = "accuracy";
  }
  return report;
}

ExplanationReport ExplainGpx(const Oracle& oracle, std::span<const double> x,
                             const Matrix& train, const ExplainOptions& options,
                             std::span<const std::string> feature_names) {
  if (x.size() != oracle.num_features() || train.cols() != x.size()) {
    throw std::invalid_argument(
        "dimension mismatch: oracle expects " +
        std::to_string(oracle.num_features()) + " features, query has " +
        std::to_string(x.size()) + ", training data has " +
        std::to_string(train.cols()));
  }
  const std::vector<double> sigma = MeasureSigma(train);
  Rng rng(options.seed);
  const NoiseSet noise = GenerateNoiseSet(x, sigma, options.noise_size, rng);
  const std::vector<double> labels = LabelWithOracle(oracle, noise.samples);
  return ExplainGpxOnNoise(noise, labels, oracle.task(), options, feature_names);
}

nlohmann::json GpConfigToJson(const GpConfig& c) {
  return {{"population_size", c.population_size},
          {"generations", c.generations},
          {"p_crossover", c.p_crossover},
          {"p_hoist", c.p_hoist},
          {"p_point", c.p_point},
          {"p_reproduction", c.p_reproduction},
          {"tournament_size", c.tournament_size},
          {"const_range", {c.const_lo, c.const_hi}},
          {"init_depths", {c.init_depth_min, c.init_depth_max}},
          {"max_depth", c.max_depth},
          {"parsimony_coefficient", c.parsimony_coefficient},
          {"p_point_replace", c.p_point_replace},
          {"stop_fitness", c.stop_fitness},
          {"seed", c.seed}};
}

GpConfig GpConfigFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("gp config must be an object");
  static const char* const kKeys[] = {
      "population_size", "generations", "p_crossover", "p_hoist", "p_point",
      "p_reproduction", "tournament_size", "const_range", "init_depths",
      "max_depth", "parsimony_coefficient", "p_point_replace", "stop_fitness",
      "seed", "n_threads"};
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : kKeys) known = known || item.key() == k;
    if (!known) throw std::invalid_argument("gp config: unknown key " + item.key());
  }
  GpConfig c;
  Read(j, "population_size", c.population_size);
  Read(j, "generations", c.generations);
  Read(j, "p_crossover", c.p_crossover);
  Read(j, "p_hoist", c.p_hoist);
  Read(j, "p_point", c.p_point);
  Read(j, "p_reproduction", c.p_reproduction);
  Read(j, "tournament_size", c.tournament_size);
  Read(j, "max_depth", c.max_depth);
  Read(j, "parsimony_coefficient", c.parsimony_coefficient);
  Read(j, "p_point_replace", c.p_point_replace);
  Read(j, "stop_fitness", c.stop_fitness);
  Read(j, "seed", c.seed);
  Read(j, "n_threads", c.n_threads);
  std::pair<double, double> range{c.const_lo, c.const_hi};
  Read(j, "const_range", range);
  c.const_lo = range.first;
  c.const_hi = range.second;
  std::pair<std::size_t, std::size_t> depths{c.init_depth_min, c.init_depth_max};
  Read(j, "init_depths", depths);
  c.init_depth_min = depths.first;
  c.init_depth_max = depths.second;
  c.Validate();
  return c;
}

nlohmann::json ToJson(const ExplanationReport& r) {
  nlohmann::json gradient = nlohmann::json::array();
  for (const double g : r.gradient_at_x) gradient.push_back(g);
  return {
      {"task", TaskName(r.task)},
      {"query", r.query},
      {"feature_names", r.feature_names},
      {"expression_infix", r.expression_infix},
      {"expression_dot", r.expression_dot},
      {"selected_features", r.selected_features},
      {"fidelity", r.fidelity},
      {"fidelity_metric", r.fidelity_metric},
      {"gradient_at_x", gradient},
      {"raw_fitness", r.raw_fitness},
      {"generations_run", r.generations_run},
      {"config",
       {{"gp", GpConfigToJson(r.options.gp)},
        {"noise_size", r.options.noise_size},
        {"noise_seed", r.options.seed},
        {"sigma", r.sigma},
        {"metric", MetricName(r.options.metric)}}},
  };
}

}  // namespace gpx
