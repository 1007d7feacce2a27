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

// Oracle served by a long-lived child process over a line protocol.
//
// Request: one line per row, the features as decimal floats joined by ",",
// each line ending in LF. Response: one decimal float per line, LF-terminated,
// in request order. The child must flush after the last line of each batch.

#ifndef GPX_EXTERNAL_ORACLE_H_
#define GPX_EXTERNAL_ORACLE_H_

#include <sys/types.h>

#include <chrono>
#include <cstddef>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "gpx/oracle.h"

namespace gpx {

class ExternalOracle : public Oracle {
 public:
  // Starts `/bin/sh -c command`. Throws std::runtime_error if it cannot be
  // spawned. SIGPIPE is ignored process-wide from then on so that a dead child
  // surfaces as a write error.
  ExternalOracle(const std::string& command, Task task, std::size_t n_features,
                 std::chrono::milliseconds timeout = std::chrono::seconds(60));
  ~ExternalOracle() override;

  ExternalOracle(const ExternalOracle&) = delete;
  ExternalOracle& operator=(const ExternalOracle&) = delete;

  Task task() const override { return task_; }
  std::size_t num_features() const override { return n_features_; }

  // One batch in flight at a time. Throws std::runtime_error on a short
  // response ("prediction count mismatch"), a malformed or non-finite line
  // (with its 1-based line number), unexpected extra output, a timeout or a
  // child that exited; the message includes the tail of the child's standard
  // error. After an error the oracle refuses further batches.
  std::vector<double> PredictBatch(const Matrix& rows) const override;

 private:
  void Shutdown();
  std::string Diagnostics() const;
  [[noreturn]] void Fail(const std::string& message) const;
  void DrainStderr() const;

  Task task_;
  std::size_t n_features_;
  std::chrono::milliseconds timeout_;
  mutable pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  int stderr_fd_ = -1;

  mutable std::mutex mu_;
  mutable bool failed_ = false;
  mutable std::string pending_;
  mutable std::string stderr_tail_;
};

// Row formatted as sent to the child, without the trailing LF.
std::string FormatRequestLine(std::span<const double> row);

}  // namespace gpx

#endif  // GPX_EXTERNAL_ORACLE_H_
