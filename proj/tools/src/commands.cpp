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


#include "cts_app/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <ostream>

#include "cts/errors.hpp"
#include "cts/teleport.hpp"
#include "cts_app/scenario.hpp"

namespace cts::app {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

nlohmann::json modes_json(const ProtocolSpec& spec) {
  auto j = nlohmann::json::object();
  for (std::size_t k = 0; k < spec.layout.size(); ++k)
    j[spec.layout[k].name] = std::string(to_string(spec.modes[k]));
  return j;
}

Scenario scenario_with_parties(const std::string& path, const GlobalOptions& options) {
  auto s = load_scenario(load_json_file(path), path, options.tol, options.seed);
  if (!s.protocol) throw ParseError(path + ": scenario has no 'parties'");
  return s;
}

nlohmann::json error_report(const char* type, const std::string& message) {
  return {{"error", {{"type", type}, {"message", message}}}};
}

}  // namespace

std::size_t resolve_max_dim(const GlobalOptions& options) {
  if (options.max_dim) return *options.max_dim;
  if (const char* env = std::getenv("CTS_MAX_DIM"); env && *env) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (*end != '\0' || v == 0)
      throw ParseError(std::string("CTS_MAX_DIM must be a positive integer, got '") + env + "'");
    return static_cast<std::size_t>(v);
  }
  return RunOptions{}.max_dim;
}

CommandResult cmd_run(const std::string& scenario_path, const GlobalOptions& options) {
  const auto t0 = Clock::now();
  const auto s = scenario_with_parties(scenario_path, options);
  const auto loaded = ms_since(t0);

  RunOptions run{resolve_max_dim(options), s.tol};
  auto r = run_protocol(*s.process, *s.protocol, run);
  if (s.kind == "switch" && std::find(s.protocol->modes.begin(), s.protocol->modes.end(),
                                      PartyMode::Deterministic) != s.protocol->modes.end())
    r.advisories.push_back(
        "the switch is causally nonseparable: deterministic two-way teleportation would need "
        "agents whose labs are themselves in an indefinite causal relation");

  auto report = r.to_json();
  report["command"] = "run";
  report["scenario"] = scenario_path;
  report["process"] = s.kind;
  report["modes"] = modes_json(*s.protocol);
  report["seed"] = s.seed;
  report["max_dim"] = run.max_dim;
  report["timings"] = {{"load_ms", loaded}, {"total_ms", ms_since(t0)}};
  return {r.ok() ? kOk : kCheckFailed, std::move(report)};
}

CommandResult cmd_validate(const ValidateOptions& validate, const GlobalOptions& options) {
  const auto t0 = Clock::now();
  if (validate.path.has_value() == validate.builtin.has_value())
    throw ParseError("validate needs exactly one of a process file or --builtin");
  if (validate.samples < 1) throw ParseError("--samples must be >= 1");
  if (validate.ancilla_dim < 1) throw ParseError("--ancilla-dim must be >= 1");

  const auto s = validate.path
                     ? load_scenario(load_json_file(*validate.path), *validate.path, options.tol,
                                     options.seed)
                     : load_scenario({{"builtin", *validate.builtin}}, "--builtin " + *validate.builtin,
                                     options.tol, options.seed);
  const auto& w = *s.process;
  const auto max_dim = resolve_max_dim(options);
  if (w.op().dim() > max_dim)
    throw ContractTooLarge("process side " + std::to_string(w.op().dim()) +
                               " exceeds the cap " + std::to_string(max_dim),
                           nlohmann::json{{"steps", nlohmann::json::array()},
                                          {"peak_dim", w.op().dim()}}
                               .dump());

  nlohmann::json report{{"command", "validate"},
                        {"source", s.source},
                        {"process", s.kind},
                        {"seed", s.seed},
                        {"tol", s.tol}};
  auto t = Clock::now();
  const auto certificate = validate_process(w, s.tol);
  report["certificate"] = certificate.to_json();
  nlohmann::json timings{{"certificate_ms", ms_since(t)}};

  t = Clock::now();
  const auto sampling = validate_by_sampling(w, validate.samples, s.seed, s.tol);
  report["sampling"] = sampling.to_json();
  timings["sampling_ms"] = ms_since(t);
  bool ok = certificate.valid() && sampling.ok;

  if (validate.ancilla_dim > 1) {
    t = Clock::now();
    std::vector<std::size_t> dims(w.layout().size(), validate.ancilla_dim);
    const auto anc = validate_with_ancillas(w, dims, validate.samples, s.seed, s.tol);
    report["ancilla_sampling"] = anc.to_json();
    report["ancilla_sampling"]["ancilla_dim"] = validate.ancilla_dim;
    timings["ancilla_sampling_ms"] = ms_since(t);
    ok = ok && anc.ok;
  }
  report["ok"] = ok;
  timings["total_ms"] = ms_since(t0);
  report["timings"] = std::move(timings);
  return {ok ? kOk : kCheckFailed, std::move(report)};
}

CommandResult cmd_teleport_demo(std::size_t dim, const GlobalOptions& options) {
  const auto t0 = Clock::now();
  if (dim < 1) throw BadDimension("--dim must be >= 1");
  const double tol = options.tol.value_or(kDefaultTol);
  const auto seed = options.seed.value_or(kDefaultSeed);
  const auto r = teleport_state_demo(dim, random_pure_state(dim, seed));
  auto report = r.to_json();
  const bool ok = r.max_probability_error <= tol && 1.0 - r.min_fidelity <= tol;
  report["command"] = "teleport-demo";
  report["seed"] = seed;
  report["tol"] = tol;
  report["ok"] = ok;
  report["timings"] = {{"total_ms", ms_since(t0)}};
  return {ok ? kOk : kCheckFailed, std::move(report)};
}

CommandResult cmd_bench(const std::string& scenario_path, const GlobalOptions& options) {
  const auto t0 = Clock::now();
  const auto s = scenario_with_parties(scenario_path, options);
  const auto n = s.protocol->layout.size();
  const std::vector<std::size_t> zeros(n, 0);
  const auto net = protocol_network(*s.process, *s.protocol, zeros, zeros);
  net.validate();

  auto t = Clock::now();
  const auto plan = plan_contraction(net);
  const double plan_ms = ms_since(t);
  const auto max_dim = resolve_max_dim(options);

  auto report = plan.to_json();
  report["command"] = "bench";
  report["scenario"] = scenario_path;
  report["factors"] = net.size();
  report["max_dim"] = max_dim;
  report["within_cap"] = plan.peak_dim <= max_dim;
  nlohmann::json timings{{"plan_ms", plan_ms}};
  if (plan.peak_dim <= max_dim) {
    t = Clock::now();
    const auto value = contract(net, plan).value();
    timings["contract_ms"] = ms_since(t);
    report["value"] = value.real();
  }
  timings["total_ms"] = ms_since(t0);
  report["timings"] = std::move(timings);
  return {kOk, std::move(report)};
}

CommandResult guarded(const std::function<CommandResult()>& command, std::ostream& diag) {
  try {
    return command();
  } catch (const ContractTooLarge& e) {
    diag << "error: " << e.what() << "\nplan: " << e.plan() << "\n";
    auto report = error_report("ContractTooLarge", e.what());
    report["error"]["plan"] = nlohmann::json::parse(e.plan(), nullptr, false);
    return {kTooLarge, std::move(report)};
  } catch (const SpecMismatch& e) {
    diag << "error: " << e.what() << "\n";
    return {kSpecMismatch, error_report("SpecMismatch", e.what())};
  } catch (const JsonSyntaxError& e) {
    diag << "error: " << e.what() << "\n";
    auto report = error_report("ParseError", e.what());
    report["error"]["line"] = e.line();
    report["error"]["column"] = e.column();
    return {kInputError, std::move(report)};
  } catch (const ParseError& e) {
    diag << "error: " << e.what() << "\n";
    return {kInputError, error_report("ParseError", e.what())};
  } catch (const Error& e) {
    diag << "error: " << e.what() << "\n";
    return {kInputError, error_report("InvalidInput", e.what())};
  } catch (const std::exception& e) {
    diag << "internal error: " << e.what() << "\n";
    return {kInternalError, error_report("Internal", e.what())};
  }
}

nlohmann::json strip_timings(const nlohmann::json& report) {
  if (report.is_object()) {
    auto out = nlohmann::json::object();
    for (const auto& [k, v] : report.items())
      if (k != "timings") out[k] = strip_timings(v);
    return out;
  }
  if (report.is_array()) {
    auto out = nlohmann::json::array();
    for (const auto& v : report) out.push_back(strip_timings(v));
    return out;
  }
  return report;
}

}  // namespace cts::app
