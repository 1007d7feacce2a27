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

#include "gpx/cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gpx/external_oracle.h"
#include "gpx/forest.h"
#include "gpx/kernel_ridge.h"
#include "gpx/random.h"
#include "gpx/stats.h"
#include "gpx/synthetic.h"

namespace gpx {
namespace {

void WriteFile(const std::string& path, const std::string& text,
               std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("error writing " + path);
}

nlohmann::json ReadJsonFile(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config " + path);
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
}

template <typename T>
T Get(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw UsageError(std::string("config: bad value for ") + key);
  }
}

void CheckKeys(const nlohmann::json& j, std::initializer_list<const char*> keys,
               const std::string& where) {
  if (!j.is_object()) throw UsageError(where + " must be an object");
  for (const auto& item : j.items()) {
    if (std::none_of(keys.begin(), keys.end(),
                     [&](const char* k) { return item.key() == k; })) {
      throw UsageError(where + ": unknown key " + item.key());
    }
  }
}

OracleSetup OracleSetupFromJson(const nlohmann::json& j) {
  if (j.is_string()) return ParseOracleSetup(j.get<std::string>());
  CheckKeys(j, {"name", "kind", "command", "trees", "max_depth", "gamma",
                "lambda", "timeout_ms"},
            "oracle");
  OracleSetup setup;
  setup.kind = Get<std::string>(j, "kind", setup.kind);
  if (setup.kind != "rf" && setup.kind != "rbf" && setup.kind != "cmd") {
    throw UsageError("oracle kind must be rf, rbf or cmd");
  }
  setup.command = Get<std::string>(j, "command", "");
  if (setup.kind == "cmd" && setup.command.empty()) {
    throw UsageError("cmd oracle needs a command");
  }
  setup.name = Get<std::string>(j, "name", setup.kind);
  setup.trees = Get<std::size_t>(j, "trees", setup.trees);
  setup.max_depth = Get<std::size_t>(j, "max_depth", setup.max_depth);
  setup.gamma = Get<double>(j, "gamma", setup.gamma);
  setup.lambda = Get<double>(j, "lambda", setup.lambda);
  setup.timeout_ms = Get<std::int64_t>(j, "timeout_ms", setup.timeout_ms);
  return setup;
}

Dataset DatasetFromJson(const nlohmann::json& j, const std::filesystem::path& base,
                        std::uint64_t seed, std::ostream& err) {
  CheckKeys(j, {"name", "generator", "samples", "csv", "target", "task"},
            "dataset");
  if (j.contains("generator") == j.contains("csv")) {
    throw UsageError("dataset needs exactly one of generator or csv");
  }
  Dataset data;
  if (j.contains("generator")) {
    const std::string gen = Get<std::string>(j, "generator", "");
    try {
      data = MakeSynthetic(gen, Get<std::size_t>(j, "samples", 1500),
                           CombineSeed(seed, StableHash("data:" + gen)));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  } else {
    std::filesystem::path path = Get<std::string>(j, "csv", "");
    if (path.is_relative()) path = base / path;
    Task task;
    try {
      task = ParseTask(Get<std::string>(j, "task", ""));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("dataset: ") + e.what());
    }
    const CsvLoadResult loaded =
        LoadCsv(path.string(), task, Get<std::string>(j, "target", ""));
    if (loaded.dropped_rows > 0) {
      err << "warning: " << path.string() << ": dropped " << loaded.dropped_rows
          << " malformed row(s)\n";
    }
    data = loaded.data;
  }
  data.name = Get<std::string>(j, "name", data.name);
  return data;
}

std::string Fixed(double v, int digits = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

void PrintSummary(const BenchResult& result, std::ostream& out) {
  for (const Aggregate& a : result.aggregates) {
    std::vector<double> values;
    for (const FidelityRecord& r : result.records) {
      if (r.task == a.task && r.explainer == a.explainer) values.push_back(r.fidelity);
    }
    out << TaskName(a.task) << "  " << a.explainer << "  n=" << a.count
        << "  mean=" << Fixed(a.mean) << "  std=" << Fixed(a.stddev)
        << "  median=" << Fixed(Median(values)) << "\n";
  }
  for (const PairwiseTest& t : result.tests) {
    out << TaskName(t.task) << "  " << t.explainer_a << " - " << t.explainer_b
        << " = 0  stat=" << Fixed(t.statistic) << "  p=" << t.p_value
        << "  p_adj=" << t.p_adjusted << "\n";
  }
}

struct ExplainFlags {
  std::string task;
  std::string data;
  std::string target;
  std::string oracle = "rf";
  std::size_t instance = 0;
  std::size_t noise_size = 1000;
  std::size_t pop = 100;
  std::size_t generations = 50;
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string dot;
  std::string metric = "mse";
  std::size_t trees = 100;
  std::size_t forest_depth = 10;
  double gamma = 0.0;
  double rbf_lambda = 1e-3;
  std::int64_t timeout_ms = 60000;
  std::size_t threads = 1;
};

int RunExplain(const ExplainFlags& f, std::ostream& out, std::ostream& err) {
  Task task;
  RegressionMetric metric;
  OracleSetup setup;
  try {
    task = ParseTask(f.task);
    metric = ParseMetric(f.metric);
    setup = ParseOracleSetup(f.oracle);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  setup.trees = f.trees;
  setup.max_depth = f.forest_depth;
  setup.gamma = f.gamma;
  setup.lambda = f.rbf_lambda;
  setup.timeout_ms = f.timeout_ms;

  const CsvLoadResult loaded = LoadCsv(f.data, task, f.target);
  if (loaded.dropped_rows > 0) {
    err << "warning: " << f.data << ": dropped " << loaded.dropped_rows
        << " malformed row(s)\n";
  }
  const Dataset& data = loaded.data;
  if (f.instance >= data.size()) {
    throw UsageError("--instance " + std::to_string(f.instance) +
                     " out of range; dataset has " + std::to_string(data.size()) +
                     " rows");
  }
  const auto [train, test] = Split(data, CombineSeed(f.seed, StableHash("split")));
  const std::unique_ptr<Oracle> oracle = MakeOracleFactory(setup).make(
      train, CombineSeed(f.seed, StableHash("oracle")));

  ExplainOptions options;
  options.gp.population_size = f.pop;
  options.gp.tournament_size = std::min(options.gp.tournament_size, f.pop);
  options.gp.generations = f.generations;
  options.gp.seed = f.seed;
  options.gp.n_threads = f.threads;
  options.noise_size = f.noise_size;
  options.metric = metric;
  options.seed = CombineSeed(f.seed, StableHash("noise"));
  try {
    options.gp.Validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (f.noise_size == 0) throw UsageError("--noise-size must be >= 1");

  const ExplanationReport report =
      ExplainGpx(*oracle, data.x.row(f.instance), train.x, options,
                 data.feature_names);
  nlohmann::json j = ToJson(report);
  j["instance"] = f.instance;
  j["oracle"] = f.oracle;
  j["data"] = f.data;
  WriteFile(f.out, j.dump(2) + "\n", out);
  if (!f.dot.empty()) WriteFile(f.dot, report.expression_dot, out);
  if (f.out != "-") {
    out << report.expression_infix << "\n"
        << report.fidelity_metric << " " << report.fidelity << "\n";
  }
  return kExitOk;
}

struct BenchFlags {
  std::string config;
  std::string out;
  std::string csv;
  std::size_t threads = 0;
};

int RunBench(const BenchFlags& f, std::ostream& out, std::ostream& err) {
  const nlohmann::json config = ReadJsonFile(f.config);
  CheckKeys(config,
            {"seed", "queries", "noise_size", "n_perm", "metric", "threads",
             "datasets", "oracles", "explainers", "gp", "linear_lambda",
             "tree_depth", "out", "csv"},
            "bench config");
  BenchOptions options;
  options.seed = Get<std::uint64_t>(config, "seed", 0);
  options.queries = Get<std::size_t>(config, "queries", options.queries);
  options.noise_size = Get<std::size_t>(config, "noise_size", options.noise_size);
  options.n_perm = Get<std::size_t>(config, "n_perm", options.n_perm);
  options.n_threads = Get<std::size_t>(config, "threads", 1);
  if (f.threads > 0) options.n_threads = f.threads;
  GpConfig gp;
  CartOptions tree;
  try {
    options.metric = ParseMetric(Get<std::string>(config, "metric", "mse"));
    if (config.contains("gp")) gp = GpConfigFromJson(config["gp"]);
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  tree.max_depth = Get<std::size_t>(config, "tree_depth", tree.max_depth);
  const double lambda = Get<double>(config, "linear_lambda", 1.0);
  if (options.noise_size == 0 || options.queries == 0 || options.n_perm == 0) {
    throw UsageError("queries, noise_size and n_perm must be >= 1");
  }

  const auto base = std::filesystem::path(f.config).parent_path();
  std::vector<Dataset> datasets;
  if (!config.contains("datasets") || !config["datasets"].is_array() ||
      config["datasets"].empty()) {
    throw UsageError("bench config needs a non-empty datasets array");
  }
  for (const auto& d : config["datasets"]) {
    datasets.push_back(DatasetFromJson(d, base, options.seed, err));
  }
  std::vector<OracleFactory> oracles;
  const nlohmann::json oracle_list =
      config.contains("oracles") ? config["oracles"] : nlohmann::json::array({"rf"});
  if (!oracle_list.is_array() || oracle_list.empty()) {
    throw UsageError("oracles must be a non-empty array");
  }
  for (const auto& o : oracle_list) oracles.push_back(MakeOracleFactory(OracleSetupFromJson(o)));

  std::vector<std::string> names = {"gpx", "linear", "tree"};
  if (config.contains("explainers")) {
    names = Get<std::vector<std::string>>(config, "explainers", names);
  }
  std::vector<std::unique_ptr<Explainer>> owned;
  std::vector<const Explainer*> explainers;
  for (const std::string& name : names) {
    try {
      owned.push_back(MakeExplainer(name, gp, lambda, tree));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    explainers.push_back(owned.back().get());
  }

  const BenchResult result = RunBenchmark(datasets, oracles, explainers, options);
  const std::string out_path = !f.out.empty() ? f.out : Get<std::string>(config, "out", "-");
  const std::string csv_path = !f.csv.empty() ? f.csv : Get<std::string>(config, "csv", "");
  WriteFile(out_path, ToJson(result).dump(2) + "\n", out);
  if (!csv_path.empty()) WriteFile(csv_path, RecordsCsv(result), out);
  if (out_path != "-") PrintSummary(result, out);
  return kExitOk;
}

struct DemoFlags {
  int figure = 0;
  std::uint64_t seed = 0;
  std::size_t queries = 10;
  std::string out;
  std::string dot;
};

int RunDemo(const DemoFlags& f, std::ostream& out, std::ostream&) {
  if (f.figure != 3) throw UsageError("only --figure 3 is available");
  std::vector<Dataset> datasets = {
      MakeBlobs(1500, CombineSeed(f.seed, StableHash("data:blobs")))};
  const std::vector<OracleFactory> oracles = {MakeOracleFactory(ParseOracleSetup("rf"))};
  const GpxExplainer gpx;
  const LinearExplainer linear;
  const TreeExplainer tree;
  const std::vector<const Explainer*> explainers = {&gpx, &linear, &tree};
  BenchOptions options;
  options.seed = f.seed;
  options.queries = f.queries;
  const BenchResult result = RunBenchmark(datasets, oracles, explainers, options);

  out << "three blobs, 1500 samples, stds 1.0/2.5/0.5; random forest oracle; "
      << result.records.size() / explainers.size() << " query points\n";
  PrintSummary(result, out);

  // The GPX surrogate of the first query point, refitted on the same stream.
  const FidelityRecord& first = result.records.front();
  const Dataset& data = datasets.front();
  const std::vector<std::size_t> train_rows = SplitTrainRows(
      data.size(), CombineSeed(options.seed, StableHash("split:" + data.name)));
  const Dataset train = data.Subset(train_rows);
  const std::uint64_t stream = QuerySeed(options.seed, data.name, "rf", first.query);
  Rng rng(stream);
  const NoiseSet noise = GenerateNoiseSet(data.x.row(first.row),
                                          MeasureSigma(train.x), options.noise_size, rng);
  const std::unique_ptr<Oracle> oracle = oracles.front().make(
      train, CombineSeed(options.seed, StableHash("oracle:" + data.name + "/rf")));
  ExplainOptions explain;
  explain.gp.seed = CombineSeed(stream, StableHash("gpx"));
  const ExplanationReport report = ExplainGpxOnNoise(
      noise, LabelWithOracle(*oracle, noise.samples), data.task, explain,
      data.feature_names);
  out << "query row " << first.row << ": f*(s) = " << report.expression_infix
      << "  (accuracy " << Fixed(report.fidelity, 3) << ")\n";
  if (!f.dot.empty()) WriteFile(f.dot, report.expression_dot, out);
  if (!f.out.empty()) {
    nlohmann::json j = ToJson(result);
    j["first_query_report"] = ToJson(report);
    WriteFile(f.out, j.dump(2) + "\n", out);
  }
  return kExitOk;
}

}  // namespace

OracleSetup ParseOracleSetup(const std::string& text) {
  OracleSetup setup;
  if (text == "rf" || text == "rbf") {
    setup.kind = text;
  } else if (text.rfind("cmd:", 0) == 0 && text.size() > 4) {
    setup.kind = "cmd";
    setup.command = text.substr(4);
  } else {
    throw UsageError("oracle must be rf, rbf or cmd:<command>, got '" + text + "'");
  }
  setup.name = setup.kind;
  return setup;
}

OracleFactory MakeOracleFactory(const OracleSetup& setup) {
  OracleFactory factory;
  factory.name = setup.name.empty() ? setup.kind : setup.name;
  factory.make = [setup](const Dataset& train,
                        std::uint64_t seed) -> std::unique_ptr<Oracle> {
    if (setup.kind == "rf") {
      ForestOptions options;
      options.n_trees = setup.trees;
      options.max_depth = setup.max_depth;
      options.seed = seed;
      return std::make_unique<RandomForest>(TrainRandomForest(train, options));
    }
    if (setup.kind == "rbf") {
      const double gamma = setup.gamma > 0.0 ? setup.gamma : ScaleGamma(train.x);
      return std::make_unique<RbfModel>(TrainRbfModel(train, gamma, setup.lambda));
    }
    return std::make_unique<ExternalOracle>(
        setup.command, train.task, train.num_features(),
        std::chrono::milliseconds(setup.timeout_ms));
  };
  return factory;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Genetic programming explainer for black-box models", "gpx"};
  app.require_subcommand(1);

  ExplainFlags ef;
  CLI::App* explain = app.add_subcommand("explain", "Explain one prediction");
  explain->add_option("--task", ef.task, "reg or clf")->required();
  explain->add_option("--data", ef.data, "Dataset CSV with a header row")->required();
  explain->add_option("--target", ef.target, "Target column name")->required();
  explain->add_option("--oracle", ef.oracle, "rf, rbf or cmd:<command>");
  explain->add_option("--instance", ef.instance, "Row index of the query point");
  explain->add_option("--noise-size", ef.noise_size, "Noise set size");
  explain->add_option("--pop", ef.pop, "GP population size");
  explain->add_option("--generations", ef.generations, "GP generations");
  explain->add_option("--seed", ef.seed, "Master seed");
  explain->add_option("--out", ef.out, "Report JSON path, - for stdout");
  explain->add_option("--dot", ef.dot, "Write the expression tree as DOT");
  explain->add_option("--metric", ef.metric, "mse or rmse");
  explain->add_option("--trees", ef.trees, "Random forest size");
  explain->add_option("--forest-depth", ef.forest_depth, "Random forest depth");
  explain->add_option("--gamma", ef.gamma, "RBF gamma, 0 for 1/(n var)");
  explain->add_option("--rbf-lambda", ef.rbf_lambda, "RBF ridge penalty");
  explain->add_option("--oracle-timeout", ef.timeout_ms,
                      "Milliseconds to wait for an external oracle batch");
  explain->add_option("--threads", ef.threads, "Fitness evaluation threads");

  BenchFlags bf;
  CLI::App* bench = app.add_subcommand("bench", "Compare explainers");
  bench->add_option("--config", bf.config, "Benchmark JSON config")->required();
  bench->add_option("--out", bf.out, "Result JSON path");
  bench->add_option("--csv", bf.csv, "Per-record CSV path");
  bench->add_option("--threads", bf.threads, "Query points run in parallel");

  DemoFlags df;
  CLI::App* demo = app.add_subcommand("demo", "Three-blob demonstration");
  demo->add_option("--figure", df.figure, "Demo number (3)")->required();
  demo->add_option("--seed", df.seed, "Master seed");
  demo->add_option("--queries", df.queries, "Query points");
  demo->add_option("--out", df.out, "Result JSON path");
  demo->add_option("--dot", df.dot, "DOT file for the first query's expression");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    err << app.help();
    return kExitUsage;
  }

  try {
    if (explain->parsed()) return RunExplain(ef, out, err);
    if (bench->parsed()) return RunBench(bf, out, err);
    return RunDemo(df, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace gpx
