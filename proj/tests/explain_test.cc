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

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpx/explain.h"
#include "gpx/fidelity.h"
#include "gpx/noise.h"
#include "test_util.h"

namespace gpx {
namespace {

using ::gpx::testing::CentralDifference;
using ::gpx::testing::FunctionOracle;
using ::gpx::testing::UniformMatrix;

Matrix Column(std::vector<double> values) {
  Matrix m(values.size(), 1, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) m(i, 0) = values[i];
  return m;
}

TEST(MeasureSigmaTest, Examples) {
  EXPECT_DOUBLE_EQ(MeasureSigma(Column({0, 2}))[0], 1.0);
  EXPECT_EQ(MeasureSigma(Column({5, 5, 5}))[0], kMinSigma);
  EXPECT_NEAR(MeasureSigma(Column({1, 1, 1, 5}))[0], std::sqrt(3.0), 1e-12);
}

TEST(MeasureSigmaTest, NeedsTwoRows) {
  try {
    MeasureSigma(Column({1}));
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "insufficient training data for sigma");
  }
}

TEST(MeasureSigmaTest, PerFeature) {
  Matrix m = {{0, 10, 1}, {2, 30, 1}};
  EXPECT_EQ(MeasureSigma(m), (std::vector<double>{1.0, 10.0, kMinSigma}));
}

TEST(NoiseSetTest, VanishingSigmaStaysAtCenter) {
  Rng rng(1);
  const std::vector<double> x = {1.5, -2.0, 40.0};
  const std::vector<double> sigma(3, kMinSigma);
  const NoiseSet noise = GenerateNoiseSet(x, sigma, 10, rng);
  ASSERT_EQ(noise.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(noise.samples(i, j), x[j], 1e-6);
  }
  EXPECT_EQ(noise.center, x);
  EXPECT_EQ(noise.sigma, sigma);
}

TEST(NoiseSetTest, SampleMeansConcentrate) {
  const std::vector<double> x = {3.0, -1.0};
  const std::vector<double> sigma = {1.0, 1.0};
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    const NoiseSet noise = GenerateNoiseSet(x, sigma, 1000, rng);
    ASSERT_EQ(noise.samples.rows(), 1000u);
    bool ok = true;
    for (std::size_t j = 0; j < 2; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < 1000; ++i) mean += noise.samples(i, j);
      ok = ok && std::abs(mean / 1000.0 - x[j]) <= 0.12;
    }
    if (ok) ++inside;
  }
  EXPECT_GE(inside, 990);
}

TEST(NoiseSetTest, SpreadFollowsSigma) {
  Rng rng(2);
  const NoiseSet noise = GenerateNoiseSet(std::vector<double>{0.0, 0.0},
                                          std::vector<double>{0.5, 4.0}, 20000, rng);
  const std::vector<double> measured = MeasureSigma(noise.samples);
  EXPECT_NEAR(measured[0], 0.5, 0.02);
  EXPECT_NEAR(measured[1], 4.0, 0.15);
}

TEST(NoiseSetTest, Errors) {
  Rng rng(3);
  const std::vector<double> x = {0.0};
  EXPECT_THROW(GenerateNoiseSet(x, std::vector<double>{1.0}, 0, rng),
               std::invalid_argument);
  EXPECT_THROW(GenerateNoiseSet(x, std::vector<double>{1.0, 1.0}, 5, rng),
               std::invalid_argument);
  EXPECT_THROW(GenerateNoiseSet(x, std::vector<double>{0.0}, 5, rng),
               std::invalid_argument);
}

TEST(FidelityTest, RegressionExamples) {
  const std::vector<double> g = {1, 3};
  EXPECT_EQ(FidelityRegression(g, g), 0.0);
  EXPECT_EQ(FidelityRegression(std::vector<double>{0, 0}, g), 5.0);
  EXPECT_EQ(FidelityRegression(std::vector<double>{2, 4}, g), 1.0);
  EXPECT_DOUBLE_EQ(
      FidelityRegression(std::vector<double>{0, 0}, g, RegressionMetric::kRmse),
      std::sqrt(5.0));
}

TEST(FidelityTest, ClassificationExamples) {
  const std::vector<double> g = {0, 1, 1, 0};
  EXPECT_EQ(FidelityClassification(g, g), 1.0);
  EXPECT_EQ(FidelityClassification(std::vector<double>{0, 1, 0, 1}, g), 0.5);
  EXPECT_EQ(FidelityClassification(std::vector<double>{1, 0, 0, 1}, g), 0.0);
}

TEST(FidelityTest, LengthMismatchAndEmpty) {
  const std::vector<double> a = {1, 2};
  const std::vector<double> b = {1};
  EXPECT_THROW(FidelityRegression(a, b), std::invalid_argument);
  EXPECT_THROW(FidelityClassification(a, b), std::invalid_argument);
  EXPECT_THROW(FidelityRegression({}, {}), std::invalid_argument);
}

TEST(FidelityTest, RangesOnRandomInputs) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + UniformIndex(rng, 50);
    std::vector<double> f(m);
    std::vector<double> g(m);
    for (std::size_t i = 0; i < m; ++i) {
      f[i] = static_cast<double>(UniformIndex(rng, 2));
      g[i] = static_cast<double>(UniformIndex(rng, 2));
    }
    const double uc = FidelityClassification(f, g);
    EXPECT_GE(uc, 0.0);
    EXPECT_LE(uc, 1.0);
    const double ur = FidelityRegression(f, g);
    EXPECT_GE(ur, 0.0);
    EXPECT_EQ(ur == 0.0, f == g);
  }
}

TEST(SnapToLabelsTest, BinaryRoundsAtHalf) {
  const std::vector<double> labels = {0, 1};
  EXPECT_EQ(SnapToLabels(std::vector<double>{-3, 0.49, 0.5, 0.7, 9}, labels),
            (std::vector<double>{0, 0, 1, 1, 1}));
}

TEST(SnapToLabelsTest, NearestOfSeveral) {
  const std::vector<double> labels = {0, 1, 2};
  EXPECT_EQ(SnapToLabels(std::vector<double>{1.4, 1.6, -1, 2.4}, labels),
            (std::vector<double>{1, 2, 0, 2}));
  EXPECT_THROW(SnapToLabels(labels, {}), std::invalid_argument);
}

GpConfig SmallConfig(std::uint64_t seed) {
  GpConfig config;
  config.seed = seed;
  return config;
}

TEST(ExplainGpxTest, ConstantOracle) {
  FunctionOracle oracle(Task::kRegression, 2, [](auto) { return 4.0; });
  const Matrix train = UniformMatrix(50, 2, 5);
  ExplainOptions options;
  options.gp = SmallConfig(0);
  const std::vector<double> x = {0.2, -0.1};
  const ExplanationReport r = ExplainGpx(oracle, x, train, options);
  EXPECT_LE(r.fidelity, 1e-6) << r.expression_infix;
  EXPECT_EQ(r.fidelity_metric, "mse");
}

TEST(ExplainGpxTest, LinearOracleSelectsItsFeature) {
  FunctionOracle oracle(Task::kRegression, 3,
                        [](auto s) { return 2.0 * s[0] + 1.0; });
  const Matrix train = UniformMatrix(100, 3, 6);
  ExplainOptions options;
  options.gp = SmallConfig(0);
  const std::vector<double> x = {0.3, 0.3, 0.3};
  const ExplanationReport r = ExplainGpx(oracle, x, train, options);
  EXPECT_EQ(r.selected_features, std::vector<std::size_t>{0}) << r.expression_infix;
  EXPECT_LE(r.fidelity, 1e-3);
  ASSERT_EQ(r.gradient_at_x.size(), 3u);
  EXPECT_NEAR(r.gradient_at_x[0], 2.0, 1e-6);
  EXPECT_EQ(r.gradient_at_x[1], 0.0);
  EXPECT_EQ(r.gradient_at_x[2], 0.0);
}

FunctionOracle NonlinearOracle() {
  return FunctionOracle(Task::kRegression, 3, [](auto s) {
    return s[0] * s[1] + std::sin(s[2]) + 0.5 * s[0] * s[0];
  });
}

TEST(ExplainGpxTest, ByteIdenticalReports) {
  const FunctionOracle oracle = NonlinearOracle();
  const Matrix train = UniformMatrix(80, 3, 7);
  ExplainOptions options;
  options.gp = SmallConfig(11);
  options.gp.generations = 10;
  options.seed = 4;
  const std::vector<double> x = {0.5, -0.5, 1.0};
  const std::string a = ToJson(ExplainGpx(oracle, x, train, options)).dump();
  const std::string b = ToJson(ExplainGpx(oracle, x, train, options)).dump();
  EXPECT_EQ(a, b);
  options.seed = 5;
  EXPECT_NE(a, ToJson(ExplainGpx(oracle, x, train, options)).dump());
}

TEST(ExplainGpxTest, ReportIsConsistentWithItsTree) {
  const FunctionOracle oracle = NonlinearOracle();
  const Matrix train = UniformMatrix(80, 3, 8);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    ExplainOptions options;
    options.gp = SmallConfig(seed);
    options.gp.generations = 15;
    options.seed = seed;
    const std::vector<double> x = {0.1 * static_cast<double>(seed), 0.4, -0.3};
    const ExplanationReport r = ExplainGpx(oracle, x, train, options);
    EXPECT_EQ(r.selected_features, r.tree.Variables());
    EXPECT_EQ(r.expression_infix, ToInfix(r.tree, r.feature_names));
    EXPECT_GE(r.fidelity, 0.0);

    // Perturbing unused features does not change the surrogate.
    Rng rng(seed);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> moved = x;
      for (std::size_t j = 0; j < moved.size(); ++j) {
        if (!std::binary_search(r.selected_features.begin(),
                                r.selected_features.end(), j)) {
          moved[j] += UniformReal(rng, -10.0, 10.0);
        }
      }
      EXPECT_EQ(Eval(r.tree, moved), Eval(r.tree, x));
    }
  }
}

TEST(ExplainGpxTest, GradientMatchesFiniteDifferences) {
  const Matrix train = UniformMatrix(80, 3, 9);
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    ExplainOptions options;
    options.gp = SmallConfig(seed);
    options.gp.generations = 15;
    options.seed = seed;
    const std::vector<double> x = {0.7, -0.2, 0.4};
    const ExplanationReport r = ExplainGpx(NonlinearOracle(), x, train, options);
    if (r.tree.ContainsOp(Op::kDiv)) continue;
    ++checked;
    for (std::size_t j = 0; j < 3; ++j) {
      const double fd = CentralDifference(r.tree, x, j);
      EXPECT_LE(std::abs(r.gradient_at_x[j] - fd) / std::max(1.0, std::abs(fd)),
                1e-5)
          << r.expression_infix;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(ExplainGpxTest, Classification) {
  FunctionOracle oracle(Task::kClassification, 2,
                        [](auto s) { return s[0] + s[1] > 0 ? 1.0 : 0.0; });
  const Matrix train = UniformMatrix(80, 2, 10);
  ExplainOptions options;
  options.gp = SmallConfig(1);
  options.gp.generations = 20;
  const std::vector<double> x = {0.05, 0.0};
  const ExplanationReport r = ExplainGpx(oracle, x, train, options);
  EXPECT_EQ(r.fidelity_metric, "accuracy");
  EXPECT_GE(r.fidelity, 0.0);
  EXPECT_LE(r.fidelity, 1.0);
  EXPECT_TRUE(r.gradient_at_x.empty());
}

TEST(ExplainGpxTest, Errors) {
  FunctionOracle oracle(Task::kRegression, 2, [](auto s) { return s[0]; });
  const Matrix train = UniformMatrix(10, 2, 11);
  ExplainOptions options;
  EXPECT_THROW(ExplainGpx(oracle, std::vector<double>{1.0}, train, options),
               std::invalid_argument);
  EXPECT_THROW(ExplainGpx(oracle, std::vector<double>{1.0, 2.0},
                          UniformMatrix(1, 2, 1), options),
               std::invalid_argument);

  FunctionOracle failing(Task::kRegression, 2, [](auto) -> double {
    throw std::runtime_error("model exploded");
  });
  try {
    ExplainGpx(failing, std::vector<double>{1.0, 2.0}, train, options);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("model exploded"), std::string::npos);
  }

  FunctionOracle nan(Task::kRegression, 2, [](auto) { return std::nan(""); });
  EXPECT_THROW(ExplainGpx(nan, std::vector<double>{1.0, 2.0}, train, options),
               std::runtime_error);
}

TEST(ExplainGpxTest, JsonFields) {
  FunctionOracle oracle(Task::kRegression, 2, [](auto s) { return s[1]; });
  ExplainOptions options;
  options.gp = SmallConfig(0);
  options.gp.generations = 3;
  const std::vector<std::string> names = {"age", "income"};
  const ExplanationReport r = ExplainGpx(oracle, std::vector<double>{1.0, 2.0},
                                         UniformMatrix(20, 2, 12), options, names);
  const nlohmann::json j = ToJson(r);
  for (const char* key : {"task", "expression_infix", "expression_dot",
                          "selected_features", "fidelity", "gradient_at_x",
                          "config"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["task"], "regression");
  EXPECT_EQ(j["config"]["noise_size"], 1000);
  EXPECT_EQ(j["config"]["gp"]["population_size"], 100);
  EXPECT_EQ(j["feature_names"], nlohmann::json(names));
  EXPECT_EQ(GpConfigToJson(GpConfigFromJson(j["config"]["gp"])),
            j["config"]["gp"]);
}

TEST(GpConfigJsonTest, DefaultsAndErrors) {
  const GpConfig c = GpConfigFromJson(nlohmann::json::parse(
      R"({"generations": 7, "const_range": [-5, 5], "seed": 9})"));
  EXPECT_EQ(c.generations, 7u);
  EXPECT_EQ(c.const_lo, -5.0);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.population_size, 100u);
  EXPECT_THROW(GpConfigFromJson(nlohmann::json::parse(R"({"popsize": 3})")),
               std::invalid_argument);
  EXPECT_THROW(GpConfigFromJson(nlohmann::json::parse(R"({"generations": "x"})")),
               std::invalid_argument);
  EXPECT_THROW(GpConfigFromJson(nlohmann::json::parse(R"({"p_crossover": 0.9})")),
               std::invalid_argument);
}

TEST(ExplainerTest, SharedInterface) {
  const Matrix x = UniformMatrix(200, 2, 13);
  std::vector<double> labels(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) labels[i] = x(i, 0) > 0.1 ? 1.0 : 0.0;
  GpConfig gp;
  gp.generations = 10;
  for (const char* name : {"gpx", "linear", "tree"}) {
    const auto e = MakeExplainer(name, gp);
    EXPECT_EQ(e->name(), name);
    const std::vector<double> p = e->FitPredict(x, labels, Task::kClassification, 1);
    ASSERT_EQ(p.size(), x.rows());
    for (const double v : p) EXPECT_TRUE(v == 0.0 || v == 1.0);
    const double uc = FidelityClassification(p, labels);
    EXPECT_GE(uc, 0.0);
    EXPECT_LE(uc, 1.0);
    if (e->name() != "gpx") EXPECT_GE(uc, 0.9) << name;
  }
  EXPECT_EQ(MakeExplainer("tree")->FitPredict(x, labels, Task::kClassification, 0),
            labels);
  EXPECT_THROW(MakeExplainer("lime"), std::invalid_argument);
}

}  // namespace
}  // namespace gpx
