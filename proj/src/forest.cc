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

#include "gpx/forest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpx/fidelity.h"
#include "gpx/random.h"

namespace gpx {

std::vector<double> RandomForest::PredictBatch(const Matrix& rows) const {
  CheckOracleInput(*this, rows);
  std::vector<double> out(rows.rows(), 0.0);
  std::vector<std::size_t> votes(labels_.size());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    const auto x = rows.row(r);
    if (task_ == Task::kRegression) {
      double sum = 0.0;
      for (const DecisionTree& t : trees_) sum += t.Predict(x);
      out[r] = sum / static_cast<double>(trees_.size());
      continue;
    }
    std::fill(votes.begin(), votes.end(), 0);
    for (const DecisionTree& t : trees_) {
      const double label = t.Predict(x);
      ++votes[static_cast<std::size_t>(
          std::lower_bound(labels_.begin(), labels_.end(), label) -
          labels_.begin())];
    }
    out[r] = labels_[static_cast<std::size_t>(
        std::max_element(votes.begin(), votes.end()) - votes.begin())];
  }
  return out;
}

RandomForest TrainRandomForest(const Dataset& data,
                               const ForestOptions& options) {
  data.Validate();
  if (options.n_trees == 0) throw std::invalid_argument("forest needs >= 1 tree");
  const std::size_t n = data.num_features();
  const std::size_t k = data.size();

  RandomForest forest;
  forest.task_ = data.task;
  forest.n_features_ = n;
  if (data.task == Task::kClassification) forest.labels_ = DistinctLabels(data.y);

  CartOptions cart;
  cart.max_depth = options.max_depth;
  cart.min_samples_split = options.min_samples_split;
  cart.max_features = options.max_features;
  if (cart.max_features == 0) {
    cart.max_features =
        data.task == Task::kClassification
            ? std::max<std::size_t>(
                  1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))))
            : std::max<std::size_t>(1, n / 3);
  }

  std::vector<std::size_t> rows(k);
  for (std::size_t t = 0; t < options.n_trees; ++t) {
    Rng rng(CombineSeed(options.seed, t));
    for (std::size_t& r : rows) r = UniformIndex(rng, k);
    forest.trees_.push_back(
        FitDecisionTree(data.x, data.y, data.task, cart, &rng, rows));
  }
  return forest;
}

}  // namespace gpx
