// Copyright 2026 The wvstat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Batch front end: run, validate, list-scenarios.
//
// Exit status: 0 when every check passes, 1 when any check fails, 2 for
// configuration, I/O or domain errors.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "wvstat/error.hpp"
#include "wvstat/report.hpp"
#include "wvstat/scenario.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;

int run(const std::string& config, const std::string& out_dir, std::optional<std::uint64_t> seed,
        const std::string& format_name) {
  const auto format = wvstat::parse_format(format_name);
  const auto scenario = wvstat::Scenario::load_file(config, seed);
  const auto report = scenario.run();
  const auto written =
      wvstat::write_report(report, out_dir, std::filesystem::path(config).stem().string(), format);
  for (const auto& path : written) std::cout << "wrote " << path.string() << "\n";
  std::cout << report.scenario_kind << ": " << report.checks.size() << " checks, "
            << (report.passed() ? "all passed" : "FAILED") << "\n";
  for (const auto& c : report.checks) {
    if (!c.pass) {
      std::cout << "  fail " << c.name << ": lhs=" << c.lhs << " rhs=" << c.rhs << " |diff|=" << c.abs_diff
                << " tol=" << c.tolerance << "\n";
    }
  }
  return report.passed() ? kPass : kCheckFailed;
}

int validate(const std::string& config) {
  const auto scenario = wvstat::Scenario::load_file(config);
  std::cout << scenario.resolved().dump(2) << "\n";
  return kPass;
}

int list_scenarios() {
  for (const auto& k : wvstat::scenario_catalog()) std::cout << k.name << "\t" << k.summary << "\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wvstat: weak values and complex quasiprobabilities in finite dimensions"};
  app.set_version_flag("--version", std::string(wvstat::artifact_version()));
  app.require_subcommand(1);

  std::string config, out_dir = ".", format = "json";
  std::optional<std::uint64_t> seed;

  auto* run_cmd = app.add_subcommand("run", "run a scenario and write its report");
  run_cmd->add_option("config", config, "scenario document")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("-o,--out", out_dir, "output directory");
  run_cmd->add_option("-s,--seed", seed, "override the document's seed");
  run_cmd->add_option("-f,--format", format, "json, csv or both")
      ->check(CLI::IsMember({"json", "csv", "both"}));

  std::string validate_config;
  auto* validate_cmd = app.add_subcommand("validate", "check a scenario document and print it resolved");
  validate_cmd->add_option("config", validate_config, "scenario document")->required();

  auto* list_cmd = app.add_subcommand("list-scenarios", "list the scenario kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (*run_cmd) return run(config, out_dir, seed, format);
    if (*validate_cmd) return validate(validate_config);
    if (*list_cmd) return list_scenarios();
  } catch (const wvstat::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}
