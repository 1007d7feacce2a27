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

// Generational genetic programming over ExprTree, minimising the RMSE between
// a tree's outputs and target values on a fixed sample set.
//
// Each generation keeps its best individual and fills the rest by tournament
// selection followed by one of crossover, hoist mutation, point mutation or
// reproduction. An offspring identical to one already placed in the next
// generation is redrawn, up to ten times in a row.

#ifndef GPX_GP_H_
#define GPX_GP_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gpx/expr.h"
#include "gpx/matrix.h"
#include "gpx/random.h"

namespace gpx {

struct GpConfig {
  std::size_t population_size = 100;
  std::size_t generations = 50;
  double p_crossover = 0.70;
  double p_hoist = 0.05;
  double p_point = 0.10;
  double p_reproduction = 0.15;
  std::size_t tournament_size = 20;
  double const_lo = -100.0;
  double const_hi = 100.0;
  std::size_t init_depth_min = 2;
  std::size_t init_depth_max = 6;
  std::size_t max_depth = 17;
  double parsimony_coefficient = 0.001;
  // Per-node replacement rate inside point mutation.
  double p_point_replace = 0.05;
  // Evolution stops early once the best raw fitness is <= stop_fitness.
  double stop_fitness = 0.0;
  std::uint64_t seed = 0;
  // Worker threads for fitness evaluation. Results do not depend on it.
  std::size_t n_threads = 1;

  // Throws std::invalid_argument describing the first violated constraint.
  void Validate() const;
};

struct Individual {
  ExprTree tree;
  double raw_fitness = 0.0;
  double penalized_fitness = 0.0;
};

enum class GeneticOp { kCrossover, kHoist, kPoint, kReproduction };

// Root mean squared error of the tree's outputs against `targets`. Saturated
// at the largest finite double. Throws std::invalid_argument on an empty or
// mismatched sample set.
double Fitness(const ExprTree& tree, const SampleColumns& samples,
               std::span<const double> targets);
double Fitness(const ExprTree& tree, const Matrix& samples,
               std::span<const double> targets);

// Index of the tournament winner: `k` entrants drawn uniformly with
// replacement, lowest penalized fitness wins, ties go to the lowest index.
std::size_t TournamentSelect(std::span<const Individual> population,
                             std::size_t k, Rng& rng);

GeneticOp ChooseOperator(const GpConfig& config, Rng& rng);

// Replaces a uniformly chosen subtree of `receiver` with a uniformly chosen
// subtree of `donor`. Draws that exceed `max_depth` are retried up to ten
// times, after which a copy of `receiver` is returned.
ExprTree Crossover(const ExprTree& receiver, const ExprTree& donor,
                   std::size_t max_depth, Rng& rng);

// Replaces the subtree at `outer` with its own subtree at `inner`, where
// `inner` indexes into the outer subtree (0 = the outer subtree itself).
ExprTree HoistAt(const ExprTree& parent, std::size_t outer, std::size_t inner);
ExprTree HoistMutation(const ExprTree& parent, Rng& rng);

// Replaces each node independently with probability `p_replace` by a random
// node of the same arity. The tree shape is preserved.
ExprTree PointMutation(const ExprTree& parent, double p_replace,
                       const TerminalOptions& terminals, Rng& rng);

// Initial population: alternating full/grow trees with depths cycling
// through [init_depth_min, init_depth_max].
std::vector<ExprTree> RampedHalfAndHalf(const GpConfig& config,
                                        std::size_t n_features, Rng& rng);

struct EvolveResult {
  // Lowest raw fitness seen over the whole run. Fitnesses within 1e-12 of
  // each other count as equal and the smaller tree wins.
  Individual best;
  // Best raw fitness of each evaluated generation, starting with the initial
  // population.
  std::vector<double> best_per_generation;
  std::size_t generations_run = 0;
};

// Called once per evaluated generation with its index and population.
using GenerationObserver =
    std::function<void(std::size_t, std::span<const Individual>)>;

EvolveResult Evolve(const GpConfig& config, const Matrix& samples,
                    std::span<const double> targets,
                    const GenerationObserver& observer = {});

}  // namespace gpx

#endif  // GPX_GP_H_
