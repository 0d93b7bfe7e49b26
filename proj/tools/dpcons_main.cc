// Copyright 2026 The dpcons Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// dpcons: command-line front end for the experiment harness.
//
//   dpcons simulate --config run.cfg --out results/
//   dpcons report --config run.cfg
//
// Exit status: 0 success, 1 invalid configuration, 2 runtime failure.
// Errors are written to stderr as {"error": {"code": ..., "message": ...}}.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dpcons/config.h"
#include "dpcons/error.h"
#include "dpcons/harness.h"
#include "dpcons/io.h"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::optional<std::size_t> runs;
  std::optional<std::size_t> horizon;
  unsigned threads = 1;
  bool paper_scale = false;
};

void PrintError(std::string_view code, std::string_view message) {
  nlohmann::ordered_json j;
  j["error"]["code"] = code;
  j["error"]["message"] = message;
  std::cerr << j.dump() << "\n";
}

dpcons::ExperimentConfig LoadWithOverrides(const Flags& flags,
                                           std::string_view command) {
  dpcons::ExperimentConfig config =
      flags.config.empty() ? dpcons::ExperimentConfig{}
                           : dpcons::LoadConfig(flags.config);
  if (command != "report") config.kind = dpcons::ParseExperimentKind(command);
  if (flags.seed) config.master_seed = *flags.seed;
  if (flags.runs) config.runs = *flags.runs;
  if (flags.horizon) config.horizon = *flags.horizon;
  if (flags.paper_scale) config.paper_scale = true;
  dpcons::ValidateConfig(config);
  return config;
}

int Execute(const std::string& command, const Flags& flags) {
  dpcons::ExperimentConfig config;
  // Everything up to a resolved scenario counts as configuration.
  try {
    config = LoadWithOverrides(flags, command);
    const dpcons::Scenario scenario = dpcons::ResolveScenario(config);
    dpcons::ResolveSchedule(config, scenario.graph.size());
  } catch (const dpcons::Error& e) {
    PrintError(dpcons::ErrorCodeName(e.code()), e.what());
    return kExitConfig;
  }

  try {
    if (command == "report") {
      std::cout << dpcons::GuaranteeReportJson(dpcons::ReportFor(config));
      return 0;
    }
    const dpcons::ExperimentOutput output =
        dpcons::RunExperiment(config, flags.threads);
    const std::filesystem::path dir(flags.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
      throw dpcons::Error(dpcons::ErrorCode::kIo,
                          "cannot create " + dir.string() + ": " +
                              ec.message());
    }
    for (const auto& [name, text] : output.files) {
      dpcons::WriteTextFile(dir / name, text);
    }
    std::cout << output.summary.dump(2) << "\n";
  } catch (const dpcons::Error& e) {
    PrintError(dpcons::ErrorCodeName(e.code()), e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    PrintError("internal", e.what());
    return kExitRuntime;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private average consensus experiments"};
  app.require_subcommand(1);
  Flags flags;

  const char* commands[][2] = {
      {"simulate", "Monte Carlo runs of one configuration"},
      {"sweep-s", "Sweep the noise-to-state gain s"},
      {"tradeoff", "Sweep epsilon with one-shot noise"},
      {"hist", "Histogram of realized limits"},
      {"rate", "Empirical mean-square convergence rate curves"},
      {"report", "Print privacy, accuracy and rate guarantees as JSON"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "Config file (key = value)");
    sub->add_option("--seed", flags.seed, "Master seed override");
    sub->add_option("--out", flags.out, "Output directory")
        ->capture_default_str();
    sub->add_option("--runs", flags.runs, "Run count override");
    sub->add_option("--horizon", flags.horizon, "Horizon override");
    sub->add_option("--threads", flags.threads, "Worker threads (0 = all)")
        ->capture_default_str();
    sub->add_flag("--paper-scale", flags.paper_scale,
                  "Use the run counts of the original experiments");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    PrintError("invalid_arguments", e.what());
    return kExitConfig;
  }
  return Execute(app.get_subcommands().front()->get_name(), flags);
}
