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

// Experiment configuration: a flat `key = value` text file. Lines starting
// with '#' are comments; list values are comma separated. See README.md for
// the key reference.

#ifndef DPCONS_CONFIG_H_
#define DPCONS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "dpcons/matrix.h"

namespace dpcons {

enum class ExperimentKind { kSimulate, kSweepS, kTradeoff, kHistogram, kRate };

std::string_view ExperimentKindName(ExperimentKind kind);
// Accepts the CLI spellings: simulate, sweep-s, tradeoff, hist, rate.
ExperimentKind ParseExperimentKind(std::string_view name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSimulate;

  // Graph: a CSV adjacency file, or a random graph with B1 + B2 weights.
  std::string graph_file;
  std::size_t n = 50;
  double edge_p = 0.1;
  std::uint64_t graph_seed = 1;

  // Initial states: a one-column/one-row CSV file, or i.i.d. Gaussian.
  std::string state_file;
  double state_mean = 50.0;
  double state_variance = 100.0;
  std::uint64_t state_seed = 2;

  std::optional<double> step_size;  // default 1 / (2 d_max)
  double delta = 1.0;

  // Noise parameters, each a scalar or one value per agent. When `c` is
  // absent the scales are calibrated from `epsilon`.
  Vector epsilon{0.1};
  Vector s{1.0};
  Vector q{0.0};
  std::optional<Vector> c;

  std::optional<std::size_t> runs;     // kind-specific default
  std::optional<std::size_t> horizon;  // kind-specific default
  std::uint64_t master_seed = 1;
  double settle_tolerance = 1e-2;
  // Spot-check the average-evolution identity on every `stride`-th run.
  std::size_t conservation_stride = 100;

  // sweep-s
  Vector s_grid;  // explicit grid; otherwise log-spaced [s_min, s_max]
  double s_min = 0.8;
  double s_max = 1.2;
  std::size_t s_points = 21;
  double alpha = 1e-6;

  // tradeoff
  Vector epsilon_grid;
  double epsilon_min = 1e-2;
  double epsilon_max = 1e2;
  std::size_t epsilon_points = 9;

  // hist
  std::size_t bins = 60;

  // rate: `runs` noise realizations for each initial condition
  std::optional<std::size_t> initial_conditions;

  // simulate/report: Chebyshev levels
  Vector accuracy_p{0.5, 0.1};

  // Run counts at the scale of the original experiments.
  bool paper_scale = false;
};

// Throws kInvalidConfig on unknown keys or malformed values.
ExperimentConfig ParseConfig(std::string_view text);
// Throws kInvalidConfig if the file cannot be read.
ExperimentConfig LoadConfig(const std::filesystem::path& path);

std::size_t EffectiveRuns(const ExperimentConfig& config);
std::size_t EffectiveHorizon(const ExperimentConfig& config);
std::size_t EffectiveInitialConditions(const ExperimentConfig& config);

// Structural checks that do not need the graph (counts, ranges, grids).
void ValidateConfig(const ExperimentConfig& config);

// Every key with its resolved value, for metadata.
nlohmann::ordered_json ConfigToJson(const ExperimentConfig& config);

}  // namespace dpcons

#endif  // DPCONS_CONFIG_H_
