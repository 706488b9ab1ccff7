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

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "cts/errors.hpp"
#include "cts/process.hpp"
#include "cts/protocols.hpp"

namespace cts::app {

inline constexpr double kDefaultTol = 1e-9;
inline constexpr std::uint64_t kDefaultSeed = 42;

/// Malformed JSON text; the message starts with "source:line:col".
class JsonSyntaxError : public ParseError {
 public:
  JsonSyntaxError(const std::string& what, std::size_t line, std::size_t column)
      : ParseError(what), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

nlohmann::json parse_json_text(const std::string& text, const std::string& source);
nlohmann::json load_json_file(const std::string& path);

/// Builds the process described by a "process" object: {"builtin": ...} or
/// {"matrix": {...}, "layout": [...]}. `seed` feeds "random" fields.
ProcessMatrix build_process(const nlohmann::json& spec, std::uint64_t seed);

/// Name of the builtin, or "matrix" for an explicit process.
std::string process_kind(const nlohmann::json& spec);

struct Scenario {
  std::string source;
  std::string kind;
  std::optional<ProcessMatrix> process;
  std::optional<ProtocolSpec> protocol;  // present iff "parties" is given
  double tol = kDefaultTol;
  std::uint64_t seed = kDefaultSeed;
};

/// Accepts a full scenario ({"process": ..., "parties": ...}) or a bare
/// process object. Overrides replace the file's tol and seed.
Scenario load_scenario(const nlohmann::json& doc, const std::string& source,
                       std::optional<double> tol = {}, std::optional<std::uint64_t> seed = {});

}  // namespace cts::app
