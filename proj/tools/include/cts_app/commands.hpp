// Copyright 2026 The cts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

namespace cts::app {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kInputError = 2,
  kSpecMismatch = 3,
  kTooLarge = 4,
  kInternalError = 70,
};

struct GlobalOptions {
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> max_dim;
};

struct CommandResult {
  int exit_code = kOk;
  nlohmann::json report;
};

/// --max-dim, else CTS_MAX_DIM, else 4096. A malformed CTS_MAX_DIM is a
/// ParseError.
std::size_t resolve_max_dim(const GlobalOptions& options);

CommandResult cmd_run(const std::string& scenario_path, const GlobalOptions& options);

struct ValidateOptions {
  std::optional<std::string> path;     // scenario or bare process file
  std::optional<std::string> builtin;  // state, comb or switch with defaults
  std::size_t samples = 50;
  std::size_t ancilla_dim = 1;  // > 1 adds the ancilla-extended sampling
};

CommandResult cmd_validate(const ValidateOptions& validate, const GlobalOptions& options);
CommandResult cmd_teleport_demo(std::size_t dim, const GlobalOptions& options);
CommandResult cmd_bench(const std::string& scenario_path, const GlobalOptions& options);

/// Runs a command, turning library errors into exit codes and an error
/// report. Diagnostics go to `diag`.
CommandResult guarded(const std::function<CommandResult()>& command, std::ostream& diag);

/// Copy of a report without its "timings" entries, at any depth.
nlohmann::json strip_timings(const nlohmann::json& report);

}  // namespace cts::app
