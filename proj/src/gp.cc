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

#include "gpx/gp.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

namespace gpx {
namespace {

constexpr int kCrossoverAttempts = 10;
// Consecutive redraws allowed when an offspring duplicates one already in the
// next generation.
constexpr int kDuplicateRetries = 10;
// Raw fitnesses closer than this are ties, broken by tree size.
constexpr double kFitnessTieTolerance = 1e-12;

void Require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument("invalid GpConfig: " + message);
}

TerminalOptions TerminalsFor(const GpConfig& config, std::size_t n_features) {
  TerminalOptions t;
  t.n_features = n_features;
  t.const_lo = config.const_lo;
  t.const_hi = config.const_hi;
  return t;
}

Individual Score(ExprTree tree, const SampleColumns& samples,
                 std::span<const double> targets, double parsimony) {
  Individual ind{std::move(tree), 0.0, 0.0};
  ind.raw_fitness = Fitness(ind.tree, samples, targets);
  ind.penalized_fitness =
      std::min(std::numeric_limits<double>::max(),
               ind.raw_fitness + parsimony * static_cast<double>(ind.tree.size()));
  return ind;
}

std::vector<Individual> ScoreAll(std::vector<ExprTree> trees,
                                 const SampleColumns& samples,
                                 std::span<const double> targets,
                                 const GpConfig& config) {
  std::vector<Individual> out(trees.size());
  const std::size_t workers =
      std::max<std::size_t>(1, std::min(config.n_threads, trees.size()));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out[i] = Score(std::move(trees[i]), samples, targets,
                     config.parsimony_coefficient);
    }
  };
  if (workers == 1) {
    work(0, trees.size());
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (trees.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(trees.size(), w * chunk);
      const std::size_t end = std::min(trees.size(), begin + chunk);
      pool.emplace_back([&, w, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

bool FitterThan(const Individual& a, const Individual& b) {
  if (a.raw_fitness < b.raw_fitness - kFitnessTieTolerance) return true;
  return std::abs(a.raw_fitness - b.raw_fitness) <= kFitnessTieTolerance &&
         a.tree.size() < b.tree.size();
}

std::size_t BestRawIndex(std::span<const Individual> population) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < population.size(); ++i) {
    if (FitterThan(population[i], population[best])) best = i;
  }
  return best;
}

std::uint64_t TreeHash(const ExprTree& tree) {
  std::uint64_t h = tree.size();
  for (const Node& n : tree.nodes()) {
    std::uint64_t bits = 0;
    static_assert(sizeof(bits) == sizeof(n.value));
    std::memcpy(&bits, &n.value, sizeof(bits));
    h = CombineSeed(h, static_cast<std::uint64_t>(n.kind) << 8 |
                           static_cast<std::uint64_t>(n.op));
    h = CombineSeed(h, n.index);
    h = CombineSeed(h, bits);
  }
  return h;
}

// Offspring under construction, with duplicate detection.
class NextGeneration {
 public:
  explicit NextGeneration(std::size_t capacity) { trees_.reserve(capacity); }

  std::size_t size() const { return trees_.size(); }

  bool Contains(const ExprTree& tree) const {
    const std::uint64_t h = TreeHash(tree);
    for (std::size_t i = 0; i < trees_.size(); ++i) {
      if (hashes_[i] == h && trees_[i] == tree) return true;
    }
    return false;
  }

  void Add(ExprTree tree) {
    hashes_.push_back(TreeHash(tree));
    trees_.push_back(std::move(tree));
  }

  std::vector<ExprTree> Release() { return std::move(trees_); }

 private:
  std::vector<ExprTree> trees_;
  std::vector<std::uint64_t> hashes_;
};

ExprTree Breed(const GpConfig& config, std::span<const Individual> population,
               const TerminalOptions& terminals, Rng& rng) {
  const GeneticOp op = ChooseOperator(config, rng);
  const ExprTree& parent =
      population[TournamentSelect(population, config.tournament_size, rng)]
          .tree;
  switch (op) {
    case GeneticOp::kCrossover: {
      const ExprTree& donor =
          population[TournamentSelect(population, config.tournament_size, rng)]
              .tree;
      return Crossover(parent, donor, config.max_depth, rng);
    }
    case GeneticOp::kHoist:
      return HoistMutation(parent, rng);
    case GeneticOp::kPoint:
      return PointMutation(parent, config.p_point_replace, terminals, rng);
    case GeneticOp::kReproduction:
      break;
  }
  return parent;
}

}  // namespace

void GpConfig::Validate() const {
  Require(population_size >= 2, "population_size must be >= 2");
  Require(tournament_size >= 1 && tournament_size <= population_size,
          "tournament_size must be in [1, population_size]");
  for (const double p : {p_crossover, p_hoist, p_point, p_reproduction}) {
    Require(p >= 0.0 && p <= 1.0, "operator probabilities must be in [0, 1]");
  }
  Require(std::abs(p_crossover + p_hoist + p_point + p_reproduction - 1.0) <=
              1e-9,
          "operator probabilities must sum to 1");
  Require(const_lo <= const_hi, "const range is empty");
  Require(init_depth_min >= 1 && init_depth_min <= init_depth_max,
          "init depths must satisfy 1 <= min <= max");
  Require(init_depth_max <= max_depth, "init depth exceeds max_depth");
  Require(p_point_replace >= 0.0 && p_point_replace <= 1.0,
          "p_point_replace must be in [0, 1]");
  Require(parsimony_coefficient >= 0.0, "parsimony_coefficient must be >= 0");
}

double Fitness(const ExprTree& tree, const SampleColumns& samples,
               std::span<const double> targets) {
  if (samples.rows() == 0 || targets.empty()) {
    throw std::invalid_argument("empty fitness set");
  }
  if (samples.rows() != targets.size()) {
    throw std::invalid_argument("fitness set has " +
                                std::to_string(samples.rows()) +
                                " samples but " +
                                std::to_string(targets.size()) + " targets");
  }
  const std::vector<double> predicted = EvalBatch(tree, samples);
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double diff = predicted[i] - targets[i];
    sum += diff * diff;
  }
  const double rmse = std::sqrt(sum / static_cast<double>(predicted.size()));
  return std::isfinite(rmse) ? rmse : std::numeric_limits<double>::max();
}

double Fitness(const ExprTree& tree, const Matrix& samples,
               std::span<const double> targets) {
  return Fitness(tree, SampleColumns(samples), targets);
}

std::size_t TournamentSelect(std::span<const Individual> population,
                             std::size_t k, Rng& rng) {
  if (population.empty() || k < 1 || k > population.size()) {
    throw std::invalid_argument("tournament size must be in [1, population]");
  }
  std::size_t winner = UniformIndex(rng, population.size());
  for (std::size_t draw = 1; draw < k; ++draw) {
    const std::size_t challenger = UniformIndex(rng, population.size());
    const double a = population[challenger].penalized_fitness;
    const double b = population[winner].penalized_fitness;
    if (a < b || (a == b && challenger < winner)) winner = challenger;
  }
  return winner;
}

GeneticOp ChooseOperator(const GpConfig& config, Rng& rng) {
  const double u = Uniform01(rng);
  double edge = config.p_crossover;
  if (u < edge) return GeneticOp::kCrossover;
  edge += config.p_hoist;
  if (u < edge) return GeneticOp::kHoist;
  edge += config.p_point;
  if (u < edge) return GeneticOp::kPoint;
  return GeneticOp::kReproduction;
}

ExprTree Crossover(const ExprTree& receiver, const ExprTree& donor,
                   std::size_t max_depth, Rng& rng) {
  for (int attempt = 0; attempt < kCrossoverAttempts; ++attempt) {
    const std::size_t cut = UniformIndex(rng, receiver.size());
    const std::size_t graft = UniformIndex(rng, donor.size());
    ExprTree child = receiver.ReplaceSubtree(cut, donor.Subtree(graft));
    if (child.depth() <= max_depth) return child;
  }
  return receiver;
}

ExprTree HoistAt(const ExprTree& parent, std::size_t outer,
                 std::size_t inner) {
  const ExprTree subtree = parent.Subtree(outer);
  return parent.ReplaceSubtree(outer, subtree.Subtree(inner));
}

ExprTree HoistMutation(const ExprTree& parent, Rng& rng) {
  const std::size_t outer = UniformIndex(rng, parent.size());
  const std::size_t span = parent.SubtreeEnd(outer) - outer;
  const std::size_t inner = UniformIndex(rng, span);
  return HoistAt(parent, outer, inner);
}

ExprTree PointMutation(const ExprTree& parent, double p_replace,
                       const TerminalOptions& terminals, Rng& rng) {
  std::vector<Node> nodes(parent.nodes().begin(), parent.nodes().end());
  for (Node& n : nodes) {
    if (Uniform01(rng) >= p_replace) continue;
    n = n.is_terminal() ? RandomTerminal(terminals, rng) : RandomFunction(rng);
  }
  return ExprTree(std::move(nodes));
}

std::vector<ExprTree> RampedHalfAndHalf(const GpConfig& config,
                                        std::size_t n_features, Rng& rng) {
  const TerminalOptions terminals = TerminalsFor(config, n_features);
  const std::size_t n_depths = config.init_depth_max - config.init_depth_min + 1;
  std::vector<ExprTree> trees;
  trees.reserve(config.population_size);
  for (std::size_t i = 0; i < config.population_size; ++i) {
    const InitMethod method = i % 2 == 0 ? InitMethod::kFull : InitMethod::kGrow;
    const std::size_t depth = config.init_depth_min + (i / 2) % n_depths;
    trees.push_back(RandomTree(method, depth, terminals, rng));
  }
  return trees;
}

EvolveResult Evolve(const GpConfig& config, const Matrix& samples,
                    std::span<const double> targets,
                    const GenerationObserver& observer) {
  config.Validate();
  if (samples.rows() == 0) throw std::invalid_argument("empty fitness set");
  if (samples.cols() == 0) throw std::invalid_argument("samples have no features");
  for (const double t : targets) {
    if (!std::isfinite(t)) throw std::invalid_argument("non-finite target");
  }
  const SampleColumns columns(samples);
  const TerminalOptions terminals = TerminalsFor(config, samples.cols());
  Rng rng(config.seed);

  std::vector<Individual> population = ScoreAll(
      RampedHalfAndHalf(config, samples.cols(), rng), columns, targets, config);

  EvolveResult result;
  std::size_t elite = BestRawIndex(population);
  result.best = population[elite];
  result.best_per_generation.push_back(population[elite].raw_fitness);
  if (observer) observer(0, population);

  while (result.generations_run < config.generations &&
         result.best.raw_fitness > config.stop_fitness) {
    NextGeneration offspring(config.population_size);
    offspring.Add(population[elite].tree);
    int retries = 0;
    while (offspring.size() < config.population_size) {
      ExprTree child = Breed(config, population, terminals, rng);
      if (retries < kDuplicateRetries && offspring.Contains(child)) {
        ++retries;
        continue;
      }
      retries = 0;
      offspring.Add(std::move(child));
    }
    population = ScoreAll(offspring.Release(), columns, targets, config);
    ++result.generations_run;
    elite = BestRawIndex(population);
    result.best_per_generation.push_back(population[elite].raw_fitness);
    if (FitterThan(population[elite], result.best)) {
      result.best = population[elite];
    }
    if (observer) observer(result.generations_run, population);
  }
  return result;
}

}  // namespace gpx
