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

#include "gpx/oracle.h"

#include <stdexcept>

namespace gpx {

const char* TaskName(Task task) {
  return task == Task::kRegression ? "regression" : "classification";
}

Task ParseTask(const std::string& text) {
  if (text == "regression" || text == "reg") return Task::kRegression;
  if (text == "classification" || text == "clf") return Task::kClassification;
  throw std::invalid_argument("unknown task: " + text);
}

void CheckOracleInput(const Oracle& oracle, const Matrix& rows) {
  if (rows.cols() != oracle.num_features()) {
    throw std::invalid_argument("oracle expects " +
                                std::to_string(oracle.num_features()) +
                                " features, got " + std::to_string(rows.cols()));
  }
}

}  // namespace gpx
