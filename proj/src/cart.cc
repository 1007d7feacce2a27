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

#include "gpx/cart.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "gpx/expr.h"

namespace gpx {

class CartBuilder {
 public:
  CartBuilder(const Matrix& samples, std::span<const double> targets,
              Task task, const CartOptions& options, Rng* rng)
      : x_(samples), y_(targets), task_(task), options_(options), rng_(rng) {
    if (task_ == Task::kClassification) {
      labels_.assign(y_.begin(), y_.end());
      std::sort(labels_.begin(), labels_.end());
      labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
      class_of_.resize(y_.size());
      for (std::size_t i = 0; i < y_.size(); ++i) {
        class_of_[i] = static_cast<std::size_t>(
            std::lower_bound(labels_.begin(), labels_.end(), y_[i]) -
            labels_.begin());
      }
    }
  }

  DecisionTree Build(std::vector<std::size_t> rows) {
    rows_ = std::move(rows);
    DecisionTree tree;
    tree_ = &tree;
    Grow(0, rows_.size(), 0);
    return tree;
  }

 private:
  struct Split {
    std::size_t feature = DecisionTree::kLeaf;
    double threshold = 0.0;
    double impurity = 0.0;
  };

  std::size_t Grow(std::size_t begin, std::size_t end, std::size_t depth) {
    const std::size_t id = tree_->nodes_.size();
    tree_->nodes_.push_back({});
    tree_->nodes_[id].value = LeafValue(begin, end);
    if (depth >= options_.max_depth || end - begin < options_.min_samples_split ||
        IsPure(begin, end)) {
      return id;
    }
    const Split split = BestSplit(begin, end);
    if (split.feature == DecisionTree::kLeaf) return id;

    const auto mid = std::stable_partition(
        rows_.begin() + static_cast<std::ptrdiff_t>(begin),
        rows_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t r) {
          return x_(r, split.feature) <= split.threshold;
        });
    const std::size_t middle = static_cast<std::size_t>(mid - rows_.begin());
    const std::size_t left = Grow(begin, middle, depth + 1);
    const std::size_t right = Grow(middle, end, depth + 1);
    DecisionTree::Node& node = tree_->nodes_[id];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    return id;
  }

  double LeafValue(std::size_t begin, std::size_t end) const {
    if (begin == end) return 0.0;
    if (task_ == Task::kRegression) {
      double sum = 0.0;
      for (std::size_t i = begin; i < end; ++i) sum += y_[rows_[i]];
      return sum / static_cast<double>(end - begin);
    }
    std::vector<std::size_t> counts(labels_.size(), 0);
    for (std::size_t i = begin; i < end; ++i) ++counts[class_of_[rows_[i]]];
    const auto best = std::max_element(counts.begin(), counts.end());
    return labels_[static_cast<std::size_t>(best - counts.begin())];
  }

  bool IsPure(std::size_t begin, std::size_t end) const {
    for (std::size_t i = begin + 1; i < end; ++i) {
      if (y_[rows_[i]] != y_[rows_[begin]]) return false;
    }
    return true;
  }

  std::vector<std::size_t> CandidateFeatures() {
    std::vector<std::size_t> features(x_.cols());
    std::iota(features.begin(), features.end(), 0);
    const std::size_t k = options_.max_features;
    if (k == 0 || k >= features.size()) return features;
    if (rng_ == nullptr) {
      throw std::invalid_argument("feature subsampling requires an rng");
    }
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(features[i],
                features[i + UniformIndex(*rng_, features.size() - i)]);
    }
    features.resize(k);
    return features;
  }

  Split BestSplit(std::size_t begin, std::size_t end) {
    Split best;
    std::vector<std::size_t> order(rows_.begin() + static_cast<std::ptrdiff_t>(begin),
                                   rows_.begin() + static_cast<std::ptrdiff_t>(end));
    const std::size_t n = order.size();
    for (const std::size_t f : CandidateFeatures()) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = x_(a, f);
        const double vb = x_(b, f);
        return va < vb || (va == vb && a < b);
      });
      if (x_(order.front(), f) == x_(order.back(), f)) continue;

      if (task_ == Task::kRegression) {
        double total = 0.0;
        double total_sq = 0.0;
        for (const std::size_t r : order) {
          total += y_[r];
          total_sq += y_[r] * y_[r];
        }
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t k = 1; k < n; ++k) {
          const double v = y_[order[k - 1]];
          sum += v;
          sum_sq += v * v;
          const double a = x_(order[k - 1], f);
          const double b = x_(order[k], f);
          if (a == b) continue;
          const double nl = static_cast<double>(k);
          const double nr = static_cast<double>(n - k);
          const double impurity = (sum_sq - sum * sum / nl) +
                                  ((total_sq - sum_sq) -
                                   (total - sum) * (total - sum) / nr);
          Consider(best, f, a, b, impurity);
        }
      } else {
        std::vector<double> left(labels_.size(), 0.0);
        std::vector<double> right(labels_.size(), 0.0);
        for (const std::size_t r : order) right[class_of_[r]] += 1.0;
        for (std::size_t k = 1; k < n; ++k) {
          const std::size_t c = class_of_[order[k - 1]];
          left[c] += 1.0;
          right[c] -= 1.0;
          const double a = x_(order[k - 1], f);
          const double b = x_(order[k], f);
          if (a == b) continue;
          const double nl = static_cast<double>(k);
          const double nr = static_cast<double>(n - k);
          double sl = 0.0;
          double sr = 0.0;
          for (std::size_t j = 0; j < labels_.size(); ++j) {
            sl += left[j] * left[j];
            sr += right[j] * right[j];
          }
          Consider(best, f, a, b, (nl - sl / nl) + (nr - sr / nr));
        }
      }
    }
    return best;
  }

  static void Consider(Split& best, std::size_t feature, double a, double b,
                       double impurity) {
    if (best.feature != DecisionTree::kLeaf && impurity >= best.impurity) return;
    double threshold = a + (b - a) / 2.0;
    if (!(threshold < b)) threshold = a;
    best = {feature, threshold, impurity};
  }

  const Matrix& x_;
  std::span<const double> y_;
  Task task_;
  CartOptions options_;
  Rng* rng_;
  std::vector<double> labels_;
  std::vector<std::size_t> class_of_;
  std::vector<std::size_t> rows_;
  DecisionTree* tree_ = nullptr;
};

double DecisionTree::Predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes_[i].feature != kLeaf) {
    const Node& n = nodes_[i];
    i = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes_[i].value;
}

std::vector<double> DecisionTree::PredictBatch(const Matrix& rows) const {
  std::vector<double> out(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) out[r] = Predict(rows.row(r));
  return out;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes_[i].feature != kLeaf) {
      level[nodes_[i].left] = level[i] + 1;
      level[nodes_[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

std::size_t DecisionTree::num_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(),
                    [](const Node& n) { return n.feature == kLeaf; }));
}

std::string DecisionTree::ToText(
    std::span<const std::string> feature_names) const {
  struct Item {
    std::size_t node;
    std::size_t indent;
    const char* prefix;
  };
  std::string out;
  std::vector<Item> stack = {{0, 0, ""}};
  while (!stack.empty()) {
    const Item item = stack.back();
    stack.pop_back();
    out.append(2 * item.indent, ' ');
    out += item.prefix;
    const Node& n = nodes_[item.node];
    if (n.feature == kLeaf) {
      out += "leaf " + FormatConstant(n.value) + "\n";
      continue;
    }
    const std::string name = n.feature < feature_names.size()
                                 ? feature_names[n.feature]
                                 : "x" + std::to_string(n.feature);
    out += "if " + name + " <= " + FormatConstant(n.threshold) + "\n";
    stack.push_back({n.right, item.indent + 1, "else "});
    stack.push_back({n.left, item.indent + 1, "then "});
  }
  return out;
}

DecisionTree FitDecisionTree(const Matrix& samples,
                             std::span<const double> targets, Task task,
                             const CartOptions& options, Rng* rng,
                             std::span<const std::size_t> rows) {
  if (samples.rows() != targets.size()) {
    throw std::invalid_argument("tree fit: samples and targets differ in size");
  }
  if (samples.rows() == 0) throw std::invalid_argument("tree fit: no samples");
  std::vector<std::size_t> selected(rows.begin(), rows.end());
  if (selected.empty()) {
    selected.resize(samples.rows());
    std::iota(selected.begin(), selected.end(), 0);
  }
  return CartBuilder(samples, targets, task, options, rng)
      .Build(std::move(selected));
}

}  // namespace gpx
