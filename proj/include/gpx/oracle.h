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

// Black-box model interface: any deterministic batch mapping from feature rows
// to predictions.

#ifndef GPX_ORACLE_H_
#define GPX_ORACLE_H_

#include <cstddef>
#include <string>
#include <vector>

#include "gpx/matrix.h"

namespace gpx {

enum class Task { kRegression, kClassification };

// "regression" or "classification".
const char* TaskName(Task task);
// Accepts the names above and the short forms "reg" and "clf".
Task ParseTask(const std::string& text);

class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual Task task() const = 0;
  virtual std::size_t num_features() const = 0;

  // One prediction per row of `rows`. Classification outputs are numeric
  // class codes.
  virtual std::vector<double> PredictBatch(const Matrix& rows) const = 0;
};

// Throws std::invalid_argument unless `rows` has `oracle.num_features()`
// columns.
void CheckOracleInput(const Oracle& oracle, const Matrix& rows);

}  // namespace gpx

#endif  // GPX_ORACLE_H_
