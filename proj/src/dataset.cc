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

#include "gpx/dataset.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gpx/random.h"

namespace gpx {
namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> SplitCells(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(Trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool ParseCell(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  char* end = nullptr;
  out = std::strtod(cell.c_str(), &end);
  return end == cell.c_str() + cell.size() && std::isfinite(out);
}

std::string Unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

}  // namespace

void Dataset::Validate() const {
  if (y.empty() || x.rows() == 0) {
    throw std::invalid_argument("dataset '" + name + "' is empty");
  }
  if (x.rows() != y.size()) {
    throw std::invalid_argument("dataset '" + name + "': rows and targets differ");
  }
  if (!feature_names.empty() && feature_names.size() != x.cols()) {
    throw std::invalid_argument("dataset '" + name +
                                "': feature name count differs from columns");
  }
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (const double v : x.row(i)) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("dataset '" + name + "' has non-finite values");
      }
    }
    if (!std::isfinite(y[i])) {
      throw std::invalid_argument("dataset '" + name + "' has non-finite targets");
    }
  }
}

Dataset Dataset::Subset(std::span<const std::size_t> rows) const {
  Dataset out{name, x.SelectRows(rows), {}, feature_names, task};
  out.y.reserve(rows.size());
  for (const std::size_t r : rows) out.y.push_back(y.at(r));
  return out;
}

std::vector<std::string> DefaultFeatureNames(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < n; ++j) names.push_back("x" + std::to_string(j));
  return names;
}

CsvLoadResult LoadCsv(const std::string& path, Task task,
                      const std::string& target_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!Trim(line).empty()) {
      header = SplitCells(line);
      break;
    }
  }
  if (header.empty()) throw std::runtime_error(path + ": no header row");
  for (std::string& h : header) h = Unquote(h);
  std::size_t target = header.size();
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == target_column) target = j;
  }
  if (target == header.size()) {
    throw std::runtime_error(path + ": missing target column '" + target_column + "'");
  }

  CsvLoadResult result;
  Dataset& data = result.data;
  data.name = path;
  data.task = task;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j != target) data.feature_names.push_back(header[j]);
  }
  data.x = Matrix(0, header.size() - 1, 0.0);
  std::vector<double> row(header.size() - 1);
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    const std::vector<std::string> cells = SplitCells(line);
    bool ok = cells.size() == header.size();
    double label = 0.0;
    for (std::size_t j = 0, k = 0; ok && j < cells.size(); ++j) {
      double v = 0.0;
      ok = ParseCell(cells[j], v);
      if (j == target) {
        label = v;
      } else {
        row[k++] = v;
      }
    }
    if (!ok) {
      ++result.dropped_rows;
      continue;
    }
    data.x.AppendRow(row);
    data.y.push_back(label);
  }
  if (data.y.empty()) throw std::runtime_error(path + ": no usable rows");
  if (task == Task::kClassification) {
    for (const double v : data.y) {
      if (v != 0.0 && v != 1.0) throw std::runtime_error(path + ": non-binary labels");
    }
  }
  return result;
}

std::vector<std::size_t> SplitTrainRows(std::size_t k, std::uint64_t seed,
                                        double train_fraction) {
  if (k < 5) throw std::invalid_argument("split needs at least 5 rows");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must be in (0, 1)");
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = k - 1; i > 0; --i) {
    std::swap(order[i], order[UniformIndex(rng, i + 1)]);
  }
  const auto n_train = static_cast<std::size_t>(
      std::ceil(train_fraction * static_cast<double>(k) - 1e-9));
  order.resize(n_train);
  return order;
}

std::pair<Dataset, Dataset> Split(const Dataset& data, std::uint64_t seed,
                                  double train_fraction) {
  const std::vector<std::size_t> train = SplitTrainRows(data.size(), seed, train_fraction);
  std::vector<bool> in_train(data.size(), false);
  for (const std::size_t r : train) in_train[r] = true;
  std::vector<std::size_t> test;
  for (std::size_t r = 0; r < data.size(); ++r) {
    if (!in_train[r]) test.push_back(r);
  }
  return {data.Subset(train), data.Subset(test)};
}

}  // namespace gpx
