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


#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "cts_app/commands.hpp"

namespace {

int emit(const cts::app::CommandResult& result, const cts::app::GlobalOptions& options) {
  const auto text = result.report.dump(2) + "\n";
  std::cout << text;
  if (options.out) {
    std::ofstream out(*options.out, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << *options.out << "\n";
      return cts::app::kInputError;
    }
    out << text;
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace cts::app;

  CLI::App app{"Simulator for teleporting process matrices"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  GlobalOptions options;
  double tol = 0.0;
  std::uint64_t seed = 0;
  std::size_t max_dim = 0;
  std::string out;
  auto* tol_opt = app.add_option("--tol", tol, "Tolerance (overrides the scenario)")
                      ->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (overrides the scenario)");
  auto* out_opt = app.add_option("--out", out, "Also write the report to this path");
  auto* max_opt = app.add_option("--max-dim", max_dim,
                                 "Cap on intermediate operator side (env CTS_MAX_DIM)")
                      ->check(CLI::PositiveNumber);
  for (auto* o : {tol_opt, seed_opt, out_opt, max_opt}) o->configurable(false);
  app.fallthrough();

  std::string scenario;
  auto* run = app.add_subcommand("run", "Run a protocol scenario and compare with W directly");
  run->add_option("scenario", scenario, "Scenario JSON file")->required();

  ValidateOptions validate;
  std::string builtin, process_path;
  auto* val = app.add_subcommand("validate", "Certify that a process matrix is valid");
  auto* path_opt = val->add_option("process", process_path, "Scenario or process JSON file");
  auto* builtin_opt = val->add_option("--builtin", builtin, "Builtin process: state, comb, switch")
                          ->check(CLI::IsMember({"state", "comb", "switch"}));
  path_opt->excludes(builtin_opt);
  val->add_option("--samples", validate.samples, "Random strategies to sample")
      ->check(CLI::PositiveNumber);
  val->add_option("--ancilla-dim", validate.ancilla_dim,
                  "Per-party ancilla dimension for the entangled sampling (1 = off)")
      ->check(CLI::PositiveNumber);

  std::size_t dim = 2;
  auto* demo = app.add_subcommand("teleport-demo", "Teleport a random qudit outcome by outcome");
  demo->add_option("--dim", dim, "Qudit dimension");

  auto* bench = app.add_subcommand("bench", "Plan and time the contraction of a scenario");
  bench->add_option("scenario", scenario, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    nlohmann::json report{{"error", {{"type", "UsageError"}, {"message", e.what()}}}};
    std::cout << report.dump(2) << "\n";
    return kInputError;
  }

  if (*tol_opt) options.tol = tol;
  if (*seed_opt) options.seed = seed;
  if (*out_opt) options.out = out;
  if (*max_opt) options.max_dim = max_dim;
  if (*path_opt) validate.path = process_path;
  if (*builtin_opt) validate.builtin = builtin;

  const auto result = guarded(
      [&]() -> CommandResult {
        if (*run) return cmd_run(scenario, options);
        if (*val) return cmd_validate(validate, options);
        if (*demo) return cmd_teleport_demo(dim, options);
        return cmd_bench(scenario, options);
      },
      std::cerr);
  return emit(result, options);
}
