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

// CART decision trees: greedy binary axis-aligned splits, variance reduction
// for regression and Gini impurity for classification.

#ifndef GPX_CART_H_
#define GPX_CART_H_

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gpx/matrix.h"
#include "gpx/oracle.h"
#include "gpx/random.h"

namespace gpx {

struct CartOptions {
  std::size_t max_depth = 5;
  std::size_t min_samples_split = 2;
  // Features drawn without replacement as split candidates at each node; 0
  // means all features.
  std::size_t max_features = 0;
};

class DecisionTree {
 public:
  static constexpr std::size_t kLeaf = std::numeric_limits<std::size_t>::max();

  struct Node {
    std::size_t feature = kLeaf;
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    // Mean target (regression) or majority label (classification).
    double value = 0.0;
  };

  // Rows with x[feature] <= threshold go left.
  double Predict(std::span<const double> x) const;
  std::vector<double> PredictBatch(const Matrix& rows) const;

  std::span<const Node> nodes() const { return nodes_; }
  // Number of splits on the longest root-to-leaf path; a single leaf has
  // depth 0.
  std::size_t depth() const;
  std::size_t num_leaves() const;

  // Indented listing, one "if x1 <= 0.500" or "leaf 3.000" line per node with
  // "then "/"else " marking the two branches.
  std::string ToText(std::span<const std::string> feature_names = {}) const;

 private:
  friend class CartBuilder;
  std::vector<Node> nodes_;
};

// Fits on the rows of `samples` listed in `rows` (all rows when empty). A node
// becomes a leaf at max_depth, when its targets are uniform, when it holds
// fewer than min_samples_split rows, or when no candidate feature varies.
// Classification leaves take the most frequent label, ties to the smallest.
// `rng` is only used when max_features is nonzero.
DecisionTree FitDecisionTree(const Matrix& samples,
                             std::span<const double> targets, Task task,
                             const CartOptions& options, Rng* rng = nullptr,
                             std::span<const std::size_t> rows = {});

}  // namespace gpx

#endif  // GPX_CART_H_
