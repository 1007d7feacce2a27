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

#ifndef GPX_DATASET_H_
#define GPX_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gpx/matrix.h"
#include "gpx/oracle.h"

namespace gpx {

struct Dataset {
  std::string name;
  Matrix x;
  std::vector<double> y;
  std::vector<std::string> feature_names;
  Task task = Task::kRegression;

  std::size_t size() const { return y.size(); }
  std::size_t num_features() const { return x.cols(); }

  // Throws std::invalid_argument if the fields disagree in size, the data is
  // empty, or any value is non-finite.
  void Validate() const;
  Dataset Subset(std::span<const std::size_t> rows) const;
};

// Feature names "x0".."x<n-1>".
std::vector<std::string> DefaultFeatureNames(std::size_t n);

struct CsvLoadResult {
  Dataset data;
  // Rows dropped because a cell was missing or not a decimal number.
  std::size_t dropped_rows = 0;
};

// Reads a header row followed by decimal rows. The target column is removed
// from the features. For classification the labels must all be 0 or 1.
// Throws std::runtime_error for an unreadable file, a missing target column,
// no rows left after filtering, or "non-binary labels".
CsvLoadResult LoadCsv(const std::string& path, Task task,
                      const std::string& target_column);

// Seeded shuffle, then the first ceil(train_fraction * k) rows form the
// training part. Throws std::invalid_argument for fewer than 5 rows.
std::pair<Dataset, Dataset> Split(const Dataset& data, std::uint64_t seed,
                                  double train_fraction = 0.8);

// Row indices of the training part chosen by Split, in training order.
std::vector<std::size_t> SplitTrainRows(std::size_t k, std::uint64_t seed,
                                        double train_fraction = 0.8);

}  // namespace gpx

#endif  // GPX_DATASET_H_
