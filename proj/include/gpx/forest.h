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

#ifndef GPX_FOREST_H_
#define GPX_FOREST_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gpx/cart.h"
#include "gpx/dataset.h"
#include "gpx/oracle.h"

namespace gpx {

struct ForestOptions {
  std::size_t n_trees = 100;
  std::size_t max_depth = 10;
  std::size_t min_samples_split = 2;
  // Split candidates per node; 0 picks floor(sqrt(n)) for classification and
  // max(1, n / 3) for regression.
  std::size_t max_features = 0;
  std::uint64_t seed = 0;
};

// Bagged CART ensemble. Predictions are the mean of the trees (regression) or
// their majority vote, ties to the smallest label (classification).
class RandomForest : public Oracle {
 public:
  Task task() const override { return task_; }
  std::size_t num_features() const override { return n_features_; }
  std::vector<double> PredictBatch(const Matrix& rows) const override;

  std::span<const DecisionTree> trees() const { return trees_; }

 private:
  friend RandomForest TrainRandomForest(const Dataset&, const ForestOptions&);

  Task task_ = Task::kRegression;
  std::size_t n_features_ = 0;
  std::vector<double> labels_;
  std::vector<DecisionTree> trees_;
};

// Each tree sees a bootstrap sample of the rows and its own rng stream derived
// from (seed, tree index). Throws std::invalid_argument for an empty dataset
// or n_trees = 0.
RandomForest TrainRandomForest(const Dataset& data,
                               const ForestOptions& options = {});

}  // namespace gpx

#endif  // GPX_FOREST_H_
