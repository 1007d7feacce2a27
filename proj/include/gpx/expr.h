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

// Symbolic expression trees over the function set {+, -, *, protected /}.
//
// A tree is stored as its nodes in prefix (pre-order) order. Every subtree is
// therefore a contiguous range of nodes, which makes subtree extraction and
// replacement (the genetic operators) simple slicing operations. Trees are
// immutable values; every transformation returns a new tree.

#ifndef GPX_EXPR_H_
#define GPX_EXPR_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gpx/matrix.h"
#include "gpx/random.h"

namespace gpx {

enum class Op : std::uint8_t { kAdd, kSub, kMul, kDiv };

inline constexpr Op kAllOps[] = {Op::kAdd, Op::kSub, Op::kMul, Op::kDiv};

// Operator symbol used in infix and DOT output.
const char* OpSymbol(Op op);

struct Node {
  enum class Kind : std::uint8_t { kConstant, kVariable, kFunction };

  Kind kind = Kind::kConstant;
  Op op = Op::kAdd;        // kFunction only.
  std::size_t index = 0;   // kVariable only.
  double value = 0.0;      // kConstant only.

  static Node Constant(double v) { return {Kind::kConstant, Op::kAdd, 0, v}; }
  static Node Variable(std::size_t i) {
    return {Kind::kVariable, Op::kAdd, i, 0.0};
  }
  static Node Function(Op o) { return {Kind::kFunction, o, 0, 0.0}; }

  bool is_terminal() const { return kind != Kind::kFunction; }

  friend bool operator==(const Node&, const Node&) = default;
};

class ExprTree {
 public:
  // The constant 0.
  ExprTree() : nodes_{Node::Constant(0.0)} {}

  static ExprTree Constant(double value);
  static ExprTree Variable(std::size_t index);
  static ExprTree Function(Op op, const ExprTree& left, const ExprTree& right);

  // Takes nodes in prefix order. Throws std::invalid_argument if the sequence
  // is not exactly one complete binary tree.
  explicit ExprTree(std::vector<Node> prefix);

  std::span<const Node> nodes() const { return nodes_; }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  const Node& root() const { return nodes_.front(); }

  std::size_t size() const { return nodes_.size(); }
  // Number of nodes on the longest root-to-leaf path; a single leaf has
  // depth 1.
  std::size_t depth() const;

  // One past the last node of the subtree rooted at `i`.
  std::size_t SubtreeEnd(std::size_t i) const;
  ExprTree Subtree(std::size_t i) const;
  // Copy of this tree with the subtree at `i` replaced by `replacement`.
  ExprTree ReplaceSubtree(std::size_t i, const ExprTree& replacement) const;

  // Sorted, de-duplicated feature indices referenced by the tree.
  std::vector<std::size_t> Variables() const;
  bool ContainsOp(Op op) const;

  friend bool operator==(const ExprTree&, const ExprTree&) = default;

 private:
  struct Unfilled {};
  explicit ExprTree(Unfilled) {}

  std::vector<Node> nodes_;
};

// Division returning 1 when |b| <= kProtectedDivThreshold.
inline constexpr double kProtectedDivThreshold = 1e-6;
double ProtectedDiv(double a, double b);

// Applies `op` with the protected semantics used by evaluation. Results that
// would overflow saturate at +/- the largest finite double, so evaluation of
// finite inputs is always finite.
double ApplyOp(Op op, double a, double b);

// Evaluates the tree at one point. Throws std::out_of_range if a variable
// index is not below x.size().
double Eval(const ExprTree& tree, std::span<const double> x);

// Column-major copy of a sample matrix, the layout used by batch evaluation.
class SampleColumns {
 public:
  explicit SampleColumns(const Matrix& samples);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return columns_.size(); }
  std::span<const double> column(std::size_t c) const { return columns_[c]; }

 private:
  std::size_t rows_ = 0;
  std::vector<std::vector<double>> columns_;
};

// Evaluates the tree on every sample. Bit-identical to calling Eval per row.
std::vector<double> EvalBatch(const ExprTree& tree, const SampleColumns& samples);
std::vector<double> EvalBatch(const ExprTree& tree, const Matrix& samples);

// Exact partial derivative with respect to feature `var`. Protected division
// is differentiated as ordinary division, so the result is not meaningful for
// points where a denominator lies inside the protection band. Trivial zero
// and one terms produced by the product and quotient rules are folded.
ExprTree Differentiate(const ExprTree& tree, std::size_t var);

// Fully parenthesised infix text, e.g. "(x1 + (x0 - (-9.558)))". Variables
// use `feature_names` when it covers their index, else "x<k>". Constants are
// printed with three decimals.
std::string ToInfix(const ExprTree& tree,
                    std::span<const std::string> feature_names = {});

// Graphviz digraph with one node per tree node, numbered in prefix order.
std::string ToDot(const ExprTree& tree,
                  std::span<const std::string> feature_names = {});

std::string FormatConstant(double value);

enum class InitMethod { kFull, kGrow };

struct TerminalOptions {
  std::size_t n_features = 1;
  double const_lo = -100.0;
  double const_hi = 100.0;
  double p_variable = 0.9;
};

// Grow mode picks a terminal at a non-final level with this probability.
inline constexpr double kGrowTerminalProbability = 0.1;

Node RandomTerminal(const TerminalOptions& options, Rng& rng);
Node RandomFunction(Rng& rng);

// Random tree of the given depth (>= 1). `kFull` places every leaf at exactly
// `depth`; `kGrow` may stop early.
ExprTree RandomTree(InitMethod method, std::size_t depth,
                    const TerminalOptions& options, Rng& rng);

}  // namespace gpx

#endif  // GPX_EXPR_H_
