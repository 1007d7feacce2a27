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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpx/bench.h"
#include "gpx/dataset.h"
#include "gpx/explain.h"
#include "gpx/forest.h"
#include "gpx/stats.h"
#include "gpx/synthetic.h"
#include "test_util.h"

namespace gpx {
namespace {

using ::gpx::testing::ExhaustiveSignFlipPValue;
using ::gpx::testing::FunctionOracle;

std::string WriteTemp(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

std::string ErrorOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

TEST(CsvTest, LoadsFeaturesAndTarget) {
  const std::string path =
      WriteTemp("basic.csv", "a, \"b\" ,y\n1,2,3\n4, 5 ,6\n");
  const CsvLoadResult r = LoadCsv(path, Task::kRegression, "y");
  EXPECT_EQ(r.dropped_rows, 0u);
  EXPECT_EQ(r.data.feature_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(r.data.x, (Matrix{{1.0, 2.0}, {4.0, 5.0}}));
  EXPECT_EQ(r.data.y, (std::vector<double>{3.0, 6.0}));
}

TEST(CsvTest, TargetMayBeAnyColumn) {
  const std::string path = WriteTemp("first.csv", "label,u,v\n1,0.5,7\n0,1.5,8\n");
  const CsvLoadResult r = LoadCsv(path, Task::kClassification, "label");
  EXPECT_EQ(r.data.feature_names, (std::vector<std::string>{"u", "v"}));
  EXPECT_EQ(r.data.y, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(r.data.task, Task::kClassification);
}

TEST(CsvTest, MalformedRowIsDroppedAndCounted) {
  std::string text = "x,y\n";
  for (int i = 0; i < 10; ++i) {
    text += i == 6 ? "abc,1\n" : std::to_string(i) + "," + std::to_string(2 * i) + "\n";
  }
  const CsvLoadResult r = LoadCsv(WriteTemp("bad.csv", text), Task::kRegression, "y");
  EXPECT_EQ(r.data.size(), 9u);
  EXPECT_EQ(r.dropped_rows, 1u);
}

TEST(CsvTest, RowsWithWrongWidthOrNonFiniteAreDropped) {
  const std::string text = "x,y\n1,2\n3\n4,5,6\nnan,1\n7,inf\n8,9\n";
  const CsvLoadResult r = LoadCsv(WriteTemp("width.csv", text), Task::kRegression, "y");
  EXPECT_EQ(r.data.size(), 2u);
  EXPECT_EQ(r.dropped_rows, 4u);
}

TEST(CsvTest, Errors) {
  EXPECT_NE(ErrorOf([] { LoadCsv("/nonexistent/file.csv", Task::kRegression, "y"); })
                .find("cannot read"),
            std::string::npos);
  const std::string nb = WriteTemp("nb.csv", "x,y\n1,0\n2,2\n");
  EXPECT_NE(ErrorOf([&] { LoadCsv(nb, Task::kClassification, "y"); })
                .find("non-binary labels"),
            std::string::npos);
  EXPECT_NO_THROW(LoadCsv(nb, Task::kRegression, "y"));
  EXPECT_NE(ErrorOf([&] { LoadCsv(nb, Task::kRegression, "z"); })
                .find("missing target column 'z'"),
            std::string::npos);
  const std::string empty = WriteTemp("empty.csv", "");
  EXPECT_THROW(LoadCsv(empty, Task::kRegression, "y"), std::runtime_error);
  const std::string none = WriteTemp("none.csv", "x,y\na,b\n");
  EXPECT_NE(ErrorOf([&] { LoadCsv(none, Task::kRegression, "y"); }).find("no usable rows"),
            std::string::npos);
}

TEST(SplitTest, EightyTwentyPartition) {
  const auto train = SplitTrainRows(10, 3);
  EXPECT_EQ(train.size(), 8u);
  const std::set<std::size_t> unique(train.begin(), train.end());
  EXPECT_EQ(unique.size(), 8u);
  EXPECT_LT(*unique.rbegin(), 10u);
  EXPECT_EQ(SplitTrainRows(10, 3), train);
  EXPECT_EQ(SplitTrainRows(7, 0).size(), 6u);  // ceil(5.6)
  EXPECT_THROW(SplitTrainRows(4, 0), std::invalid_argument);
}

TEST(SplitTest, DatasetsPartitionTheRows) {
  const Dataset d = MakeFriedman(50, 1);
  const auto [train, test] = Split(d, 12);
  EXPECT_EQ(train.size(), 40u);
  EXPECT_EQ(test.size(), 10u);
  std::multiset<double> all(d.y.begin(), d.y.end());
  std::multiset<double> parts(train.y.begin(), train.y.end());
  parts.insert(test.y.begin(), test.y.end());
  EXPECT_EQ(all, parts);
  EXPECT_NE(SplitTrainRows(50, 12), SplitTrainRows(50, 13));
}

TEST(PermutationTest, IdenticalSamplesGivePOne) {
  const std::vector<double> a = {0.3, 0.1, 0.7, 0.2, 0.9};
  EXPECT_DOUBLE_EQ(PairwisePermutationTest(a, a).p_value, 1.0);
  const std::vector<double> many(40, 0.5);
  EXPECT_DOUBLE_EQ(PairwisePermutationTest(many, many, 1000).p_value, 1.0);
}

TEST(PermutationTest, ThreeEqualShiftsByHand) {
  const std::vector<double> a = {10, 10, 10};
  const std::vector<double> b = {0, 0, 0};
  const PermutationResult r = PairwisePermutationTest(a, b);
  EXPECT_TRUE(r.exhaustive);
  EXPECT_DOUBLE_EQ(r.statistic, 10.0);
  EXPECT_DOUBLE_EQ(r.p_value, 0.25);
}

TEST(PermutationTest, SymmetricInItsArguments) {
  Rng rng(4);
  for (const std::size_t n : {5, 30}) {
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = Uniform01(rng);
      b[i] = Uniform01(rng) + 0.1;
    }
    const auto ab = PairwisePermutationTest(a, b, 2000, 9);
    const auto ba = PairwisePermutationTest(b, a, 2000, 9);
    EXPECT_DOUBLE_EQ(ab.p_value, ba.p_value);
    EXPECT_DOUBLE_EQ(ab.statistic, -ba.statistic);
  }
}

TEST(PermutationTest, ExhaustiveRouteMatchesIndependentEnumeration) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + UniformIndex(rng, 12);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = Uniform01(rng);
      b[i] = trial % 3 == 0 ? a[i] + (i % 2 ? 0.25 : -0.25) : Uniform01(rng);
    }
    const PermutationResult r = PairwisePermutationTest(a, b, 10000, trial);
    ASSERT_TRUE(r.exhaustive);
    EXPECT_NEAR(r.p_value, ExhaustiveSignFlipPValue(a, b), 1e-12) << "trial " << trial;
  }
}

TEST(PermutationTest, MonteCarloRouteApproachesEnumeration) {
  // n = 12 has 4096 patterns, more than n_perm, so the sampled route runs.
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(12), b(12);
    for (std::size_t i = 0; i < 12; ++i) {
      a[i] = Uniform01(rng);
      b[i] = Uniform01(rng);
    }
    const PermutationResult r = PairwisePermutationTest(a, b, 4000, trial);
    ASSERT_FALSE(r.exhaustive);
    const double exact = ExhaustiveSignFlipPValue(a, b);
    // Five standard errors of a 4000-draw estimate.
    const double se = std::sqrt(std::max(exact * (1 - exact), 0.01) / 4000.0);
    EXPECT_NEAR(r.p_value, exact, 5 * se + 1.0 / 4001) << "trial " << trial;
  }
}

TEST(PermutationTest, MonteCarloPValueIsNeverZero) {
  std::vector<double> a(40, 1.0), b(40, 0.0);
  const PermutationResult r = PairwisePermutationTest(a, b, 999, 1);
  EXPECT_FALSE(r.exhaustive);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0 / 1000.0);
}

TEST(PermutationTest, Errors) {
  const std::vector<double> a = {1, 2};
  const std::vector<double> b = {1};
  EXPECT_THROW(PairwisePermutationTest(a, b), std::invalid_argument);
  EXPECT_THROW(PairwisePermutationTest({}, {}), std::invalid_argument);
  EXPECT_THROW(PairwisePermutationTest(a, a, 0), std::invalid_argument);
}

TEST(BonferroniTest, Examples) {
  const std::vector<double> p = {0.1099, 0.02, 0.5};
  const std::vector<double> adj = BonferroniAdjust(p);
  EXPECT_NEAR(adj[0], 0.3297, 5e-5);
  EXPECT_NEAR(adj[1], 0.06, 1e-15);
  EXPECT_DOUBLE_EQ(adj[2], 1.0);
  EXPECT_TRUE(BonferroniAdjust({}).empty());
  EXPECT_THROW(BonferroniAdjust(std::vector<double>{0.0}), std::invalid_argument);
  EXPECT_THROW(BonferroniAdjust(std::vector<double>{1.5}), std::invalid_argument);
}

TEST(BonferroniTest, NeverBelowRawAndCapped) {
  Rng rng(8);
  std::vector<double> p(7);
  for (double& v : p) v = 1e-6 + Uniform01(rng) * (1 - 1e-6);
  const std::vector<double> adj = BonferroniAdjust(p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_GE(adj[i], p[i]);
    EXPECT_LE(adj[i], 1.0);
  }
}

TEST(DescriptiveTest, MeanStdMedian) {
  const std::vector<double> v = {2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(Mean(v), 5.0);
  EXPECT_NEAR(SampleStdDev(v), std::sqrt(32.0 / 7.0), 1e-15);
  EXPECT_DOUBLE_EQ(Median(v), 4.5);
  EXPECT_DOUBLE_EQ(Median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(SampleStdDev(std::vector<double>{1.0}), 0.0);
}

// Returns the labels unchanged, so its fidelity is perfect.
class CopyExplainer : public Explainer {
 public:
  std::string name() const override { return "copy"; }
  std::vector<double> FitPredict(const Matrix&, std::span<const double> labels, Task,
                                 std::uint64_t) const override {
    return {labels.begin(), labels.end()};
  }
};

// Records a hash of every sample set it sees.
class SpyExplainer : public Explainer {
 public:
  explicit SpyExplainer(std::string name) : name_(std::move(name)) {}
  std::string name() const override { return name_; }
  std::vector<double> FitPredict(const Matrix& samples, std::span<const double> labels,
                                 Task, std::uint64_t) const override {
    std::lock_guard<std::mutex> lock(mu_);
    seen_.push_back(HashSamples(samples));
    return std::vector<double>(labels.size(), 0.0);
  }
  std::vector<std::uint64_t> seen() const {
    std::lock_guard<std::mutex> lock(mu_);
    return seen_;
  }

 private:
  std::string name_;
  mutable std::mutex mu_;
  mutable std::vector<std::uint64_t> seen_;
};

OracleFactory LinearFactory() {
  return {"lin", [](const Dataset& train, std::uint64_t) -> std::unique_ptr<Oracle> {
            return std::make_unique<FunctionOracle>(
                train.task, train.num_features(),
                [](std::span<const double> x) { return 3 * x[0] - 2 * x[1]; });
          }};
}

OracleFactory ForestFactory() {
  return {"rf", [](const Dataset& train, std::uint64_t seed) -> std::unique_ptr<Oracle> {
            ForestOptions options;
            options.n_trees = 10;
            options.seed = seed;
            return std::make_unique<RandomForest>(TrainRandomForest(train, options));
          }};
}

BenchOptions SmallOptions() {
  BenchOptions options;
  options.queries = 2;
  options.noise_size = 200;
  options.n_perm = 500;
  return options;
}

TEST(BenchmarkTest, OneRecordPerQueryAndExplainer) {
  const std::vector<Dataset> data = {MakeFriedman(100, 1)};
  const std::vector<OracleFactory> oracles = {LinearFactory()};
  const LinearExplainer linear(0.0);
  const TreeExplainer tree;
  const CopyExplainer copy;
  const std::vector<const Explainer*> explainers = {&linear, &tree, &copy};
  const BenchResult r = RunBenchmark(data, oracles, explainers, SmallOptions());
  ASSERT_EQ(r.records.size(), 6u);
  EXPECT_EQ(r.records[0].explainer, "linear");
  EXPECT_EQ(r.records[2].explainer, "copy");
  EXPECT_EQ(r.records[3].query, 1u);
  EXPECT_DOUBLE_EQ(r.records[2].fidelity, 0.0);
  EXPECT_NEAR(r.records[0].fidelity, 0.0, 1e-12);
  ASSERT_EQ(r.aggregates.size(), 3u);
  ASSERT_EQ(r.tests.size(), 3u);
  EXPECT_EQ(r.tests[0].explainer_a, "linear");
  EXPECT_EQ(r.tests[0].explainer_b, "tree");
  for (const PairwiseTest& t : r.tests) {
    EXPECT_EQ(t.pairs, 2u);
    EXPECT_DOUBLE_EQ(t.p_adjusted, std::min(1.0, 3 * t.p_value));
  }
  // Query rows come from the test part of the split.
  const auto train = SplitTrainRows(100, CombineSeed(0, StableHash("split:friedman")));
  for (const FidelityRecord& rec : r.records) {
    EXPECT_EQ(std::count(train.begin(), train.end(), rec.row), 0);
  }
}

TEST(BenchmarkTest, CopyingExplainerIsPerfectOnClassification) {
  const std::vector<Dataset> data = {MakeBlobs(150, 2)};
  const std::vector<OracleFactory> oracles = {ForestFactory()};
  const CopyExplainer copy;
  const std::vector<const Explainer*> explainers = {&copy};
  for (const FidelityRecord& rec : RunBenchmark(data, oracles, explainers, SmallOptions()).records) {
    EXPECT_DOUBLE_EQ(rec.fidelity, 1.0);
  }
}

TEST(BenchmarkTest, ExplainersShareTheNoiseSet) {
  const std::vector<Dataset> data = {MakeFriedman(60, 3), MakeXor(60, 4)};
  const std::vector<OracleFactory> oracles = {ForestFactory()};
  const SpyExplainer a("a"), b("b");
  const std::vector<const Explainer*> explainers = {&a, &b};
  BenchOptions options = SmallOptions();
  options.queries = 4;
  options.n_threads = 3;
  const BenchResult r = RunBenchmark(data, oracles, explainers, options);
  ASSERT_EQ(r.records.size(), 16u);
  std::vector<std::uint64_t> sa = a.seen(), sb = b.seen();
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  EXPECT_EQ(sa, sb);
  EXPECT_EQ(std::set<std::uint64_t>(sa.begin(), sa.end()).size(), 8u);
  for (std::size_t i = 0; i < r.records.size(); i += 2) {
    EXPECT_EQ(r.records[i].noise_hash, r.records[i + 1].noise_hash);
  }
}

TEST(BenchmarkTest, ThreadCountDoesNotChangeResults) {
  const std::vector<Dataset> data = {MakeFriedman(80, 5), MakeBlobs(90, 6)};
  const std::vector<OracleFactory> oracles = {ForestFactory()};
  GpConfig gp;
  gp.population_size = 30;
  gp.generations = 5;
  const GpxExplainer gpx(gp);
  const LinearExplainer linear;
  const std::vector<const Explainer*> explainers = {&gpx, &linear};
  BenchOptions options = SmallOptions();
  options.queries = 5;
  const std::string serial = ToJson(RunBenchmark(data, oracles, explainers, options)).dump();
  options.n_threads = 4;
  const std::string threaded = ToJson(RunBenchmark(data, oracles, explainers, options)).dump();
  EXPECT_EQ(serial, threaded);
}

TEST(BenchmarkTest, ErrorsAreTaggedWithTheQuery) {
  const std::vector<Dataset> data = {MakeFriedman(60, 3)};
  const std::vector<OracleFactory> oracles = {
      {"broken", [](const Dataset& train, std::uint64_t) -> std::unique_ptr<Oracle> {
         return std::make_unique<FunctionOracle>(
             train.task, train.num_features(), [](std::span<const double>) -> double {
               throw std::runtime_error("model offline");
             });
       }}};
  const LinearExplainer linear;
  const std::vector<const Explainer*> explainers = {&linear};
  const std::string what =
      ErrorOf([&] { RunBenchmark(data, oracles, explainers, SmallOptions()); });
  EXPECT_NE(what.find("dataset 'friedman', oracle 'broken', query 0"), std::string::npos)
      << what;
  EXPECT_NE(what.find("model offline"), std::string::npos) << what;
}

TEST(BenchmarkTest, RejectsBadSetups) {
  const std::vector<Dataset> data = {MakeFriedman(60, 3)};
  const std::vector<OracleFactory> oracles = {LinearFactory()};
  const LinearExplainer linear;
  const std::vector<const Explainer*> twice = {&linear, &linear};
  EXPECT_THROW(RunBenchmark(data, oracles, twice, SmallOptions()), std::invalid_argument);
  const std::vector<const Explainer*> none;
  EXPECT_THROW(RunBenchmark(data, oracles, none, SmallOptions()), std::invalid_argument);
  const std::vector<Dataset> blobs = {MakeBlobs(60, 3)};
  const std::vector<const Explainer*> one = {&linear};
  const std::vector<OracleFactory> regression = {
      {"reg", [](const Dataset& train, std::uint64_t) -> std::unique_ptr<Oracle> {
         return std::make_unique<FunctionOracle>(Task::kRegression, train.num_features(),
                                                 [](std::span<const double>) { return 0.0; });
       }}};
  // A regression oracle on a classification dataset.
  EXPECT_THROW(RunBenchmark(blobs, regression, one, SmallOptions()), std::runtime_error);
}

TEST(BenchmarkTest, CsvAndJsonOutputs) {
  const std::vector<Dataset> data = {MakeFriedman(60, 3)};
  const std::vector<OracleFactory> oracles = {LinearFactory()};
  const CopyExplainer copy;
  const std::vector<const Explainer*> explainers = {&copy};
  const BenchResult r = RunBenchmark(data, oracles, explainers, SmallOptions());
  const std::string csv = RecordsCsv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "dataset,oracle,explainer,task,query,row,fidelity");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  const nlohmann::json j = ToJson(r);
  EXPECT_EQ(j["records"].size(), 2u);
  EXPECT_EQ(j["aggregates"][0]["explainer"], "copy");
  EXPECT_TRUE(j["tests"].empty());
}

}  // namespace
}  // namespace gpx
