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

#include "gpx/expr.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace gpx {
namespace {

constexpr double kMaxFinite = std::numeric_limits<double>::max();

inline double Saturate(double v) {
  return std::isinf(v) ? std::copysign(kMaxFinite, v) : v;
}

inline double Apply(Op op, double a, double b) {
  switch (op) {
    case Op::kAdd:
      return Saturate(a + b);
    case Op::kSub:
      return Saturate(a - b);
    case Op::kMul:
      return Saturate(a * b);
    case Op::kDiv:
      return Saturate(ProtectedDiv(a, b));
  }
  return 0.0;
}

// Returns one past the subtree at `i`, or 0 if the sequence is truncated.
std::size_t ScanSubtree(std::span<const Node> nodes, std::size_t i) {
  std::size_t pending = 1;
  while (pending > 0) {
    if (i >= nodes.size()) return 0;
    if (nodes[i].is_terminal()) {
      --pending;
    } else {
      ++pending;
    }
    ++i;
  }
  return i;
}

double EvalAt(std::span<const Node> nodes, std::size_t& cursor,
              std::span<const double> x) {
  const Node& n = nodes[cursor++];
  switch (n.kind) {
    case Node::Kind::kConstant:
      return n.value;
    case Node::Kind::kVariable:
      if (n.index >= x.size()) {
        throw std::out_of_range("variable index " + std::to_string(n.index) +
                                " out of range for input of size " +
                                std::to_string(x.size()));
      }
      return x[n.index];
    case Node::Kind::kFunction: {
      const double left = EvalAt(nodes, cursor, x);
      const double right = EvalAt(nodes, cursor, x);
      return Apply(n.op, left, right);
    }
  }
  return 0.0;
}

void FillLeaf(const Node& n, const SampleColumns& samples,
              std::span<double> out) {
  if (n.kind == Node::Kind::kConstant) {
    std::fill(out.begin(), out.end(), n.value);
    return;
  }
  if (n.index >= samples.cols()) {
    throw std::out_of_range("variable index " + std::to_string(n.index) +
                            " out of range for input of size " +
                            std::to_string(samples.cols()));
  }
  const auto col = samples.column(n.index);
  std::copy(col.begin(), col.end(), out.begin());
}

template <typename F>
void Combine(std::span<double> out, std::span<const double> right, F f) {
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = Saturate(f(out[r], right[r]));
}

// Evaluates the subtree at `cursor` into `out`. The right operand of the node
// at recursion level `level` lives in scratch[level], which must already hold
// one row-sized buffer per tree level.
void EvalBatchAt(std::span<const Node> nodes, std::size_t& cursor,
                 const SampleColumns& samples,
                 std::vector<std::vector<double>>& scratch, std::size_t level,
                 std::span<double> out) {
  const Node& n = nodes[cursor++];
  if (n.is_terminal()) {
    FillLeaf(n, samples, out);
    return;
  }
  EvalBatchAt(nodes, cursor, samples, scratch, level + 1, out);
  auto& right = scratch[level];
  EvalBatchAt(nodes, cursor, samples, scratch, level + 1, right);
  switch (n.op) {
    case Op::kAdd:
      Combine(out, right, [](double a, double b) { return a + b; });
      break;
    case Op::kSub:
      Combine(out, right, [](double a, double b) { return a - b; });
      break;
    case Op::kMul:
      Combine(out, right, [](double a, double b) { return a * b; });
      break;
    case Op::kDiv:
      Combine(out, right, [](double a, double b) { return ProtectedDiv(a, b); });
      break;
  }
}

bool IsConstant(const ExprTree& t, double v) {
  return t.size() == 1 && t.root().kind == Node::Kind::kConstant &&
         t.root().value == v;
}

bool IsConstant(const ExprTree& t) {
  return t.size() == 1 && t.root().kind == Node::Kind::kConstant;
}

ExprTree FoldConstants(Op op, const ExprTree& a, const ExprTree& b) {
  return ExprTree::Constant(Apply(op, a.root().value, b.root().value));
}

ExprTree MakeAdd(const ExprTree& a, const ExprTree& b) {
  if (IsConstant(a) && IsConstant(b)) return FoldConstants(Op::kAdd, a, b);
  if (IsConstant(a, 0.0)) return b;
  if (IsConstant(b, 0.0)) return a;
  return ExprTree::Function(Op::kAdd, a, b);
}

ExprTree MakeSub(const ExprTree& a, const ExprTree& b) {
  if (IsConstant(a) && IsConstant(b)) return FoldConstants(Op::kSub, a, b);
  if (IsConstant(b, 0.0)) return a;
  return ExprTree::Function(Op::kSub, a, b);
}

ExprTree MakeMul(const ExprTree& a, const ExprTree& b) {
  if (IsConstant(a, 0.0) || IsConstant(b, 0.0)) return ExprTree::Constant(0.0);
  if (IsConstant(a) && IsConstant(b)) return FoldConstants(Op::kMul, a, b);
  if (IsConstant(a, 1.0)) return b;
  if (IsConstant(b, 1.0)) return a;
  return ExprTree::Function(Op::kMul, a, b);
}

ExprTree MakeDiv(const ExprTree& a, const ExprTree& b) {
  if (IsConstant(a) && IsConstant(b)) return FoldConstants(Op::kDiv, a, b);
  if (IsConstant(a, 0.0)) return ExprTree::Constant(0.0);
  if (IsConstant(b, 1.0)) return a;
  return ExprTree::Function(Op::kDiv, a, b);
}

ExprTree DifferentiateAt(const ExprTree& tree, std::size_t i, std::size_t var) {
  const Node& n = tree.node(i);
  switch (n.kind) {
    case Node::Kind::kConstant:
      return ExprTree::Constant(0.0);
    case Node::Kind::kVariable:
      return ExprTree::Constant(n.index == var ? 1.0 : 0.0);
    case Node::Kind::kFunction:
      break;
  }
  const std::size_t left_at = i + 1;
  const std::size_t right_at = tree.SubtreeEnd(left_at);
  const ExprTree left = tree.Subtree(left_at);
  const ExprTree right = tree.Subtree(right_at);
  const ExprTree dleft = DifferentiateAt(tree, left_at, var);
  const ExprTree dright = DifferentiateAt(tree, right_at, var);
  switch (n.op) {
    case Op::kAdd:
      return MakeAdd(dleft, dright);
    case Op::kSub:
      return MakeSub(dleft, dright);
    case Op::kMul:
      return MakeAdd(MakeMul(dleft, right), MakeMul(left, dright));
    case Op::kDiv:
      // (a/b)' = a'/b when b' = 0, else (a'b - ab') / b^2.
      if (IsConstant(dright, 0.0)) return MakeDiv(dleft, right);
      return MakeDiv(MakeSub(MakeMul(dleft, right), MakeMul(left, dright)),
                     MakeMul(right, right));
  }
  return ExprTree::Constant(0.0);
}

std::string VariableName(std::size_t index,
                         std::span<const std::string> feature_names) {
  if (index < feature_names.size()) return feature_names[index];
  return "x" + std::to_string(index);
}

std::string InfixAt(const ExprTree& tree, std::size_t& cursor,
                    std::span<const std::string> names, bool nested) {
  const Node& n = tree.node(cursor++);
  switch (n.kind) {
    case Node::Kind::kConstant: {
      std::string text = FormatConstant(n.value);
      if (nested && text.front() == '-') return "(" + text + ")";
      return text;
    }
    case Node::Kind::kVariable:
      return VariableName(n.index, names);
    case Node::Kind::kFunction:
      break;
  }
  std::string left = InfixAt(tree, cursor, names, true);
  std::string right = InfixAt(tree, cursor, names, true);
  return "(" + left + " " + OpSymbol(n.op) + " " + right + ")";
}

std::string EscapeDotLabel(const std::string& label) {
  std::string out;
  for (const char c : label) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

const char* OpSymbol(Op op) {
  switch (op) {
    case Op::kAdd:
      return "+";
    case Op::kSub:
      return "-";
    case Op::kMul:
      return "*";
    case Op::kDiv:
      return "/";
  }
  return "?";
}

ExprTree ExprTree::Constant(double value) {
  ExprTree t{Unfilled{}};
  t.nodes_.push_back(Node::Constant(value));
  return t;
}

ExprTree ExprTree::Variable(std::size_t index) {
  ExprTree t{Unfilled{}};
  t.nodes_.push_back(Node::Variable(index));
  return t;
}

ExprTree ExprTree::Function(Op op, const ExprTree& left,
                            const ExprTree& right) {
  ExprTree t{Unfilled{}};
  t.nodes_.reserve(1 + left.size() + right.size());
  t.nodes_.push_back(Node::Function(op));
  t.nodes_.insert(t.nodes_.end(), left.nodes_.begin(), left.nodes_.end());
  t.nodes_.insert(t.nodes_.end(), right.nodes_.begin(), right.nodes_.end());
  return t;
}

ExprTree::ExprTree(std::vector<Node> prefix) : nodes_(std::move(prefix)) {
  if (nodes_.empty() || ScanSubtree(nodes_, 0) != nodes_.size()) {
    throw std::invalid_argument("node sequence is not a complete binary tree");
  }
}

std::size_t ExprTree::depth() const {
  // Stack of remaining child slots per open function node.
  std::vector<int> open;
  std::size_t best = 0;
  for (const Node& n : nodes_) {
    best = std::max(best, open.size() + 1);
    if (!n.is_terminal()) {
      open.push_back(2);
      continue;
    }
    while (!open.empty() && --open.back() == 0) open.pop_back();
  }
  return best;
}

std::size_t ExprTree::SubtreeEnd(std::size_t i) const {
  return ScanSubtree(nodes_, i);
}

ExprTree ExprTree::Subtree(std::size_t i) const {
  ExprTree t{Unfilled{}};
  t.nodes_.assign(nodes_.begin() + i, nodes_.begin() + SubtreeEnd(i));
  return t;
}

ExprTree ExprTree::ReplaceSubtree(std::size_t i,
                                  const ExprTree& replacement) const {
  const std::size_t end = SubtreeEnd(i);
  ExprTree t{Unfilled{}};
  t.nodes_.reserve(size() - (end - i) + replacement.size());
  t.nodes_.insert(t.nodes_.end(), nodes_.begin(), nodes_.begin() + i);
  t.nodes_.insert(t.nodes_.end(), replacement.nodes_.begin(),
                  replacement.nodes_.end());
  t.nodes_.insert(t.nodes_.end(), nodes_.begin() + end, nodes_.end());
  return t;
}

std::vector<std::size_t> ExprTree::Variables() const {
  std::vector<std::size_t> out;
  for (const Node& n : nodes_) {
    if (n.kind == Node::Kind::kVariable) out.push_back(n.index);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool ExprTree::ContainsOp(Op op) const {
  return std::any_of(nodes_.begin(), nodes_.end(), [op](const Node& n) {
    return n.kind == Node::Kind::kFunction && n.op == op;
  });
}

double ProtectedDiv(double a, double b) {
  return std::abs(b) > kProtectedDivThreshold ? a / b : 1.0;
}

double ApplyOp(Op op, double a, double b) { return Apply(op, a, b); }

double Eval(const ExprTree& tree, std::span<const double> x) {
  std::size_t cursor = 0;
  return EvalAt(tree.nodes(), cursor, x);
}

SampleColumns::SampleColumns(const Matrix& samples) : rows_(samples.rows()) {
  columns_.reserve(samples.cols());
  for (std::size_t c = 0; c < samples.cols(); ++c) {
    columns_.push_back(samples.column(c));
  }
}

std::vector<double> EvalBatch(const ExprTree& tree,
                              const SampleColumns& samples) {
  std::vector<double> out(samples.rows());
  std::vector<std::vector<double>> scratch(
      tree.depth(), std::vector<double>(samples.rows()));
  std::size_t cursor = 0;
  EvalBatchAt(tree.nodes(), cursor, samples, scratch, 0, out);
  return out;
}

std::vector<double> EvalBatch(const ExprTree& tree, const Matrix& samples) {
  return EvalBatch(tree, SampleColumns(samples));
}

ExprTree Differentiate(const ExprTree& tree, std::size_t var) {
  return DifferentiateAt(tree, 0, var);
}

std::string FormatConstant(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", value);
  std::string text(buf);
  if (text == "-0.000") text = "0.000";
  return text;
}

std::string ToInfix(const ExprTree& tree,
                    std::span<const std::string> feature_names) {
  std::size_t cursor = 0;
  return InfixAt(tree, cursor, feature_names, false);
}

std::string ToDot(const ExprTree& tree,
                  std::span<const std::string> feature_names) {
  std::ostringstream os;
  os << "digraph program {\n";
  os << "node [style=filled]\n";
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const Node& n = tree.node(i);
    std::string label;
    const char* color = "#60a6f6";
    switch (n.kind) {
      case Node::Kind::kConstant:
        label = FormatConstant(n.value);
        break;
      case Node::Kind::kVariable:
        label = VariableName(n.index, feature_names);
        break;
      case Node::Kind::kFunction:
        label = OpSymbol(n.op);
        color = "#136ed4";
        break;
    }
    os << i << " [label=\"" << EscapeDotLabel(label) << "\", fillcolor=\""
       << color << "\"] ;\n";
  }
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if (tree.node(i).is_terminal()) continue;
    const std::size_t left = i + 1;
    const std::size_t right = tree.SubtreeEnd(left);
    os << i << " -> " << left << " ;\n";
    os << i << " -> " << right << " ;\n";
  }
  os << "}\n";
  return os.str();
}

Node RandomTerminal(const TerminalOptions& options, Rng& rng) {
  if (Uniform01(rng) < options.p_variable) {
    return Node::Variable(UniformIndex(rng, options.n_features));
  }
  return Node::Constant(UniformReal(rng, options.const_lo, options.const_hi));
}

Node RandomFunction(Rng& rng) {
  return Node::Function(kAllOps[UniformIndex(rng, std::size(kAllOps))]);
}

namespace {

void GrowInto(std::vector<Node>& out, InitMethod method, std::size_t depth,
              const TerminalOptions& options, Rng& rng) {
  if (depth <= 1 || (method == InitMethod::kGrow &&
                     Uniform01(rng) < kGrowTerminalProbability)) {
    out.push_back(RandomTerminal(options, rng));
    return;
  }
  out.push_back(RandomFunction(rng));
  GrowInto(out, method, depth - 1, options, rng);
  GrowInto(out, method, depth - 1, options, rng);
}

}  // namespace

ExprTree RandomTree(InitMethod method, std::size_t depth,
                    const TerminalOptions& options, Rng& rng) {
  if (depth < 1) throw std::invalid_argument("tree depth must be >= 1");
  if (options.n_features == 0) {
    throw std::invalid_argument("at least one feature is required");
  }
  std::vector<Node> nodes;
  GrowInto(nodes, method, depth, options, rng);
  return ExprTree(std::move(nodes));
}

}  // namespace gpx
