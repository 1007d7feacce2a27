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

// Explainer comparison over many query points: for every dataset, oracle and
// query point one noise set is drawn, labelled by the oracle and handed to
// every explainer, and each explainer's fidelity on it is recorded.

#ifndef GPX_BENCH_H_
#define GPX_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gpx/dataset.h"
#include "gpx/explain.h"
#include "gpx/fidelity.h"
#include "gpx/oracle.h"
#include "json.hpp"

namespace gpx {

struct OracleFactory {
  std::string name;
  // Builds the black box from the training part of a dataset.
  std::function<std::unique_ptr<Oracle>(const Dataset& train, std::uint64_t seed)>
      make;
};

struct BenchOptions {
  // Query points drawn without replacement from the test part; all of them
  // when the test part is smaller.
  std::size_t queries = 100;
  std::size_t noise_size = 1000;
  std::uint64_t seed = 0;
  RegressionMetric metric = RegressionMetric::kMse;
  std::size_t n_perm = 10000;
  // Query points evaluated concurrently. Results do not depend on it.
  std::size_t n_threads = 1;
};

struct FidelityRecord {
  std::string dataset;
  std::string oracle;
  std::string explainer;
  Task task = Task::kRegression;
  std::size_t query = 0;
  // Row of the full dataset used as the query point.
  std::size_t row = 0;
  double fidelity = 0.0;
  // Hash of the noise set shared by the explainers at this query point.
  std::uint64_t noise_hash = 0;
};

struct Aggregate {
  Task task = Task::kRegression;
  std::string explainer;
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct PairwiseTest {
  Task task = Task::kRegression;
  std::string explainer_a;
  std::string explainer_b;
  std::size_t pairs = 0;
  // Mean paired difference a - b.
  double statistic = 0.0;
  double p_value = 1.0;
  double p_adjusted = 1.0;
};

struct BenchResult {
  std::vector<FidelityRecord> records;
  std::vector<Aggregate> aggregates;
  std::vector<PairwiseTest> tests;
  BenchOptions options;
  std::vector<std::string> explainers;
};

// Hash of a sample matrix's shape and bit patterns.
std::uint64_t HashSamples(const Matrix& samples);

// Seed of the stream owned by one query point.
std::uint64_t QuerySeed(std::uint64_t seed, const std::string& dataset,
                        const std::string& oracle, std::size_t query);

// Records are ordered by dataset, oracle, query, explainer. Aggregates and
// pairwise tests are computed per task over all records of that task; tests
// pair records by (dataset, oracle, query) and are Bonferroni-adjusted over
// the pairs of explainers. Errors are rethrown as std::runtime_error tagged
// with the dataset, oracle and query index.
BenchResult RunBenchmark(std::span<const Dataset> datasets,
                         std::span<const OracleFactory> oracles,
                         std::span<const Explainer* const> explainers,
                         const BenchOptions& options);

nlohmann::json ToJson(const BenchResult& result);
// Header "dataset,oracle,explainer,task,query,row,fidelity", one line per
// record.
std::string RecordsCsv(const BenchResult& result);

}  // namespace gpx

#endif  // GPX_BENCH_H_
