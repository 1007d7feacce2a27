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

// Command-line front end.
//
//   explain --task {reg|clf} --data <csv> --target <col>
//           --oracle {rf|rbf|cmd:<command>} --instance <row> [--out <json>]
//           [--dot <file>] ...
//   bench --config <json> [--out <json>] [--csv <file>]
//   demo --figure 3 [--out <json>]
//
// Exit codes: 0 success, 1 usage error, 2 runtime error.

#ifndef GPX_CLI_H_
#define GPX_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpx/bench.h"
#include "gpx/dataset.h"
#include "gpx/oracle.h"
#include "json.hpp"

namespace gpx {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

// Bad flags or configuration.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct OracleSetup {
  std::string name;
  // "rf", "rbf" or "cmd".
  std::string kind = "rf";
  std::string command;
  std::size_t trees = 100;
  std::size_t max_depth = 10;
  // 0 selects ScaleGamma of the training features.
  double gamma = 0.0;
  double lambda = 1e-3;
  std::int64_t timeout_ms = 60000;
};

// Parses "rf", "rbf" or "cmd:<command>". Throws UsageError.
OracleSetup ParseOracleSetup(const std::string& text);
OracleFactory MakeOracleFactory(const OracleSetup& setup);

// `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace gpx

#endif  // GPX_CLI_H_
