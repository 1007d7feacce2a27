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

#include "gpx/bench.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstring>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "gpx/noise.h"
#include "gpx/random.h"
#include "gpx/stats.h"

namespace gpx {
namespace {

struct QueryJob {
  std::size_t query;
  std::size_t row;
};

std::vector<FidelityRecord> RunQuery(const Dataset& data, const Oracle& oracle,
                                     const std::string& oracle_name,
                                     std::span<const Explainer* const> explainers,
                                     std::span<const double> sigma,
                                     const QueryJob& job,
                                     const BenchOptions& options) {
  const std::uint64_t stream =
      QuerySeed(options.seed, data.name, oracle_name, job.query);
  Rng rng(stream);
  const NoiseSet noise =
      GenerateNoiseSet(data.x.row(job.row), sigma, options.noise_size, rng);
  const std::vector<double> labels = LabelWithOracle(oracle, noise.samples);
  const std::uint64_t hash = HashSamples(noise.samples);
  std::vector<FidelityRecord> out;
  for (const Explainer* e : explainers) {
    const std::vector<double> predictions = e->FitPredict(
        noise.samples, labels, data.task, CombineSeed(stream, StableHash(e->name())));
    out.push_back({data.name, oracle_name, e->name(), data.task, job.query,
                   job.row, Fidelity(data.task, predictions, labels, options.metric),
                   hash});
  }
  return out;
}

void RunQueries(const Dataset& data, const Oracle& oracle,
                const std::string& oracle_name,
                std::span<const Explainer* const> explainers,
                std::span<const double> sigma, std::span<const QueryJob> jobs,
                const BenchOptions& options,
                std::vector<FidelityRecord>& records) {
  std::vector<std::vector<FidelityRecord>> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  auto work = [&](std::size_t i) {
    try {
      results[i] = RunQuery(data, oracle, oracle_name, explainers, sigma, jobs[i],
                            options);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers =
      std::max<std::size_t>(1, std::min(options.n_threads, jobs.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      work(i);
      if (errors[i]) break;
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) work(i);
      });
    }
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!errors[i]) continue;
    std::string what = "unknown error";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    throw std::runtime_error("dataset '" + data.name + "', oracle '" + oracle_name +
                             "', query " + std::to_string(jobs[i].query) + ": " +
                             what);
  }
  for (auto& r : results) records.insert(records.end(), r.begin(), r.end());
}

void Summarise(BenchResult& result) {
  const std::size_t e = result.explainers.size();
  for (const Task task : {Task::kRegression, Task::kClassification}) {
    // Records of one query point are contiguous, one per explainer.
    std::vector<std::vector<double>> by_explainer(e);
    for (std::size_t i = 0; i + e <= result.records.size(); i += e) {
      if (result.records[i].task != task) continue;
      for (std::size_t k = 0; k < e; ++k) {
        by_explainer[k].push_back(result.records[i + k].fidelity);
      }
    }
    if (e == 0 || by_explainer[0].empty()) continue;
    for (std::size_t k = 0; k < e; ++k) {
      result.aggregates.push_back({task, result.explainers[k],
                                   by_explainer[k].size(), Mean(by_explainer[k]),
                                   SampleStdDev(by_explainer[k])});
    }
    std::vector<PairwiseTest> tests;
    std::vector<double> p_values;
    for (std::size_t a = 0; a < e; ++a) {
      for (std::size_t b = a + 1; b < e; ++b) {
        const std::string& na = result.explainers[a];
        const std::string& nb = result.explainers[b];
        const PermutationResult p = PairwisePermutationTest(
            by_explainer[a], by_explainer[b], result.options.n_perm,
            CombineSeed(result.options.seed,
                        StableHash(std::string("perm:") + TaskName(task) + ":" +
                                   na + ":" + nb)));
        tests.push_back({task, na, nb, by_explainer[a].size(), p.statistic,
                         p.p_value, 1.0});
        p_values.push_back(p.p_value);
      }
    }
    const std::vector<double> adjusted = BonferroniAdjust(p_values);
    for (std::size_t i = 0; i < tests.size(); ++i) {
      tests[i].p_adjusted = adjusted[i];
      result.tests.push_back(tests[i]);
    }
  }
}

}  // namespace

std::uint64_t HashSamples(const Matrix& samples) {
  std::uint64_t h = CombineSeed(samples.rows(), samples.cols());
  for (const double v : samples.data()) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    h = CombineSeed(h, bits);
  }
  return h;
}

std::uint64_t QuerySeed(std::uint64_t seed, const std::string& dataset,
                        const std::string& oracle, std::size_t query) {
  return CombineSeed(
      CombineSeed(CombineSeed(seed, StableHash(dataset)), StableHash(oracle)),
      query);
}

BenchResult RunBenchmark(std::span<const Dataset> datasets,
                         std::span<const OracleFactory> oracles,
                         std::span<const Explainer* const> explainers,
                         const BenchOptions& options) {
  if (datasets.empty()) throw std::invalid_argument("benchmark needs a dataset");
  if (oracles.empty()) throw std::invalid_argument("benchmark needs an oracle");
  if (explainers.empty()) throw std::invalid_argument("benchmark needs an explainer");
  BenchResult result;
  result.options = options;
  for (const Explainer* e : explainers) {
    if (std::find(result.explainers.begin(), result.explainers.end(), e->name()) !=
        result.explainers.end()) {
      throw std::invalid_argument("duplicate explainer: " + e->name());
    }
    result.explainers.push_back(e->name());
  }

  for (const Dataset& data : datasets) {
    data.Validate();
    const std::vector<std::size_t> train_rows = SplitTrainRows(
        data.size(), CombineSeed(options.seed, StableHash("split:" + data.name)));
    std::vector<bool> in_train(data.size(), false);
    for (const std::size_t r : train_rows) in_train[r] = true;
    std::vector<std::size_t> test_rows;
    for (std::size_t r = 0; r < data.size(); ++r) {
      if (!in_train[r]) test_rows.push_back(r);
    }
    const Dataset train = data.Subset(train_rows);
    const std::vector<double> sigma = MeasureSigma(train.x);

    Rng pick(CombineSeed(options.seed, StableHash("queries:" + data.name)));
    for (std::size_t i = 0; i + 1 < test_rows.size(); ++i) {
      std::swap(test_rows[i], test_rows[i + UniformIndex(pick, test_rows.size() - i)]);
    }
    std::vector<QueryJob> jobs;
    for (std::size_t q = 0; q < std::min(options.queries, test_rows.size()); ++q) {
      jobs.push_back({q, test_rows[q]});
    }

    for (const OracleFactory& factory : oracles) {
      const std::unique_ptr<Oracle> oracle = factory.make(
          train, CombineSeed(options.seed,
                             StableHash("oracle:" + data.name + "/" + factory.name)));
      if (oracle->num_features() != data.num_features()) {
        throw std::runtime_error("oracle '" + factory.name + "' expects " +
                                 std::to_string(oracle->num_features()) +
                                 " features but dataset '" + data.name + "' has " +
                                 std::to_string(data.num_features()));
      }
      if (oracle->task() != data.task) {
        throw std::runtime_error("oracle '" + factory.name +
                                 "' task differs from dataset '" + data.name + "'");
      }
      RunQueries(data, *oracle, factory.name, explainers, sigma, jobs, options,
                 result.records);
    }
  }
  Summarise(result);
  return result;
}

nlohmann::json ToJson(const BenchResult& result) {
  nlohmann::json records = nlohmann::json::array();
  for (const FidelityRecord& r : result.records) {
    records.push_back({{"dataset", r.dataset},
                       {"oracle", r.oracle},
                       {"explainer", r.explainer},
                       {"task", TaskName(r.task)},
                       {"query", r.query},
                       {"row", r.row},
                       {"fidelity", r.fidelity},
                       {"noise_hash", r.noise_hash}});
  }
  nlohmann::json aggregates = nlohmann::json::array();
  for (const Aggregate& a : result.aggregates) {
    aggregates.push_back({{"task", TaskName(a.task)},
                          {"explainer", a.explainer},
                          {"count", a.count},
                          {"mean", a.mean},
                          {"std", a.stddev}});
  }
  nlohmann::json tests = nlohmann::json::array();
  for (const PairwiseTest& t : result.tests) {
    tests.push_back({{"task", TaskName(t.task)},
                     {"comparison", t.explainer_a + " - " + t.explainer_b + " = 0"},
                     {"explainer_a", t.explainer_a},
                     {"explainer_b", t.explainer_b},
                     {"pairs", t.pairs},
                     {"statistic", t.statistic},
                     {"statistic_kind", "mean paired difference"},
                     {"p_value", t.p_value},
                     {"p_adjusted", t.p_adjusted}});
  }
  const BenchOptions& o = result.options;
  return {{"options",
           {{"queries", o.queries},
            {"noise_size", o.noise_size},
            {"seed", o.seed},
            {"metric", MetricName(o.metric)},
            {"n_perm", o.n_perm}}},
          {"explainers", result.explainers},
          {"records", records},
          {"aggregates", aggregates},
          {"tests", tests}};
}

std::string RecordsCsv(const BenchResult& result) {
  std::string out = "dataset,oracle,explainer,task,query,row,fidelity\n";
  char buf[64];
  for (const FidelityRecord& r : result.records) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.fidelity);
    out += r.dataset + "," + r.oracle + "," + r.explainer + "," +
           TaskName(r.task) + "," + std::to_string(r.query) + "," +
           std::to_string(r.row) + "," + buf + "\n";
  }
  return out;
}

}  // namespace gpx
