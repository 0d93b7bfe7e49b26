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

#include "dpcons/config.h"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>

#include "dpcons/error.h"
#include "dpcons/io.h"

namespace dpcons {

namespace {

[[noreturn]] void Invalid(const std::string& message) {
  throw Error(ErrorCode::kInvalidConfig, message);
}

std::uint64_t ParseU64(std::string_view text, std::string_view key) {
  text = Trim(text);
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    Invalid("key '" + std::string(key) + "': expected a non-negative integer");
  }
  return value;
}

std::size_t ParseCount(std::string_view text, std::string_view key) {
  return static_cast<std::size_t>(ParseU64(text, key));
}

double ParseNumber(std::string_view text, std::string_view key) {
  const double v = ParseDouble(text, "number for key '" + std::string(key) +
                                         "'");
  if (!std::isfinite(v)) Invalid("key '" + std::string(key) + "' not finite");
  return v;
}

Vector ParseList(std::string_view text, std::string_view key) {
  Vector out;
  for (auto field : SplitFields(text, ',')) {
    out.push_back(ParseNumber(field, key));
  }
  return out;
}

bool ParseBool(std::string_view text, std::string_view key) {
  text = Trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  Invalid("key '" + std::string(key) + "': expected true or false");
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& Setters() {
  static const auto* setters = new std::map<std::string, Setter, std::less<>>{
      {"kind",
       [](ExperimentConfig& c, std::string_view v) {
         c.kind = ParseExperimentKind(Trim(v));
       }},
      {"graph_file",
       [](ExperimentConfig& c, std::string_view v) {
         c.graph_file = std::string(Trim(v));
       }},
      {"n",
       [](ExperimentConfig& c, std::string_view v) { c.n = ParseCount(v, "n"); }},
      {"edge_p",
       [](ExperimentConfig& c, std::string_view v) {
         c.edge_p = ParseNumber(v, "edge_p");
       }},
      {"graph_seed",
       [](ExperimentConfig& c, std::string_view v) {
         c.graph_seed = ParseU64(v, "graph_seed");
       }},
      {"state_file",
       [](ExperimentConfig& c, std::string_view v) {
         c.state_file = std::string(Trim(v));
       }},
      {"state_mean",
       [](ExperimentConfig& c, std::string_view v) {
         c.state_mean = ParseNumber(v, "state_mean");
       }},
      {"state_variance",
       [](ExperimentConfig& c, std::string_view v) {
         c.state_variance = ParseNumber(v, "state_variance");
       }},
      {"state_seed",
       [](ExperimentConfig& c, std::string_view v) {
         c.state_seed = ParseU64(v, "state_seed");
       }},
      {"step_size",
       [](ExperimentConfig& c, std::string_view v) {
         if (Trim(v) == "auto") {
           c.step_size.reset();
         } else {
           c.step_size = ParseNumber(v, "step_size");
         }
       }},
      {"delta",
       [](ExperimentConfig& c, std::string_view v) {
         c.delta = ParseNumber(v, "delta");
       }},
      {"epsilon",
       [](ExperimentConfig& c, std::string_view v) {
         c.epsilon = ParseList(v, "epsilon");
       }},
      {"s", [](ExperimentConfig& c, std::string_view v) { c.s = ParseList(v, "s"); }},
      {"q", [](ExperimentConfig& c, std::string_view v) { c.q = ParseList(v, "q"); }},
      {"c",
       [](ExperimentConfig& c, std::string_view v) {
         if (Trim(v) == "auto") {
           c.c.reset();
         } else {
           c.c = ParseList(v, "c");
         }
       }},
      {"runs",
       [](ExperimentConfig& c, std::string_view v) {
         c.runs = ParseCount(v, "runs");
       }},
      {"horizon",
       [](ExperimentConfig& c, std::string_view v) {
         c.horizon = ParseCount(v, "horizon");
       }},
      {"master_seed",
       [](ExperimentConfig& c, std::string_view v) {
         c.master_seed = ParseU64(v, "master_seed");
       }},
      {"settle_tolerance",
       [](ExperimentConfig& c, std::string_view v) {
         c.settle_tolerance = ParseNumber(v, "settle_tolerance");
       }},
      {"conservation_stride",
       [](ExperimentConfig& c, std::string_view v) {
         c.conservation_stride = ParseCount(v, "conservation_stride");
       }},
      {"s_grid",
       [](ExperimentConfig& c, std::string_view v) {
         c.s_grid = ParseList(v, "s_grid");
       }},
      {"s_min",
       [](ExperimentConfig& c, std::string_view v) {
         c.s_min = ParseNumber(v, "s_min");
       }},
      {"s_max",
       [](ExperimentConfig& c, std::string_view v) {
         c.s_max = ParseNumber(v, "s_max");
       }},
      {"s_points",
       [](ExperimentConfig& c, std::string_view v) {
         c.s_points = ParseCount(v, "s_points");
       }},
      {"alpha",
       [](ExperimentConfig& c, std::string_view v) {
         c.alpha = ParseNumber(v, "alpha");
       }},
      {"epsilon_grid",
       [](ExperimentConfig& c, std::string_view v) {
         c.epsilon_grid = ParseList(v, "epsilon_grid");
       }},
      {"epsilon_min",
       [](ExperimentConfig& c, std::string_view v) {
         c.epsilon_min = ParseNumber(v, "epsilon_min");
       }},
      {"epsilon_max",
       [](ExperimentConfig& c, std::string_view v) {
         c.epsilon_max = ParseNumber(v, "epsilon_max");
       }},
      {"epsilon_points",
       [](ExperimentConfig& c, std::string_view v) {
         c.epsilon_points = ParseCount(v, "epsilon_points");
       }},
      {"bins",
       [](ExperimentConfig& c, std::string_view v) {
         c.bins = ParseCount(v, "bins");
       }},
      {"initial_conditions",
       [](ExperimentConfig& c, std::string_view v) {
         c.initial_conditions = ParseCount(v, "initial_conditions");
       }},
      {"accuracy_p",
       [](ExperimentConfig& c, std::string_view v) {
         c.accuracy_p = ParseList(v, "accuracy_p");
       }},
      {"paper_scale",
       [](ExperimentConfig& c, std::string_view v) {
         c.paper_scale = ParseBool(v, "paper_scale");
       }},
  };
  return *setters;
}

void CheckPerAgent(const Vector& values, std::size_t n, const char* key) {
  if (values.size() != 1 && values.size() != n) {
    Invalid(std::string("key '") + key + "' needs 1 or n = " +
            std::to_string(n) + " values");
  }
}

}  // namespace

std::string_view ExperimentKindName(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSimulate: return "simulate";
    case ExperimentKind::kSweepS: return "sweep-s";
    case ExperimentKind::kTradeoff: return "tradeoff";
    case ExperimentKind::kHistogram: return "hist";
    case ExperimentKind::kRate: return "rate";
  }
  return "simulate";
}

ExperimentKind ParseExperimentKind(std::string_view name) {
  for (auto kind : {ExperimentKind::kSimulate, ExperimentKind::kSweepS,
                    ExperimentKind::kTradeoff, ExperimentKind::kHistogram,
                    ExperimentKind::kRate}) {
    if (ExperimentKindName(kind) == name) return kind;
  }
  Invalid("unknown experiment kind '" + std::string(name) + "'");
}

ExperimentConfig ParseConfig(std::string_view text) {
  ExperimentConfig config;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    ++line_no;
    auto line = text.substr(start, pos - start);
    start = pos + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      Invalid("line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = Trim(line.substr(0, eq));
    const auto value = Trim(line.substr(eq + 1));
    const auto it = Setters().find(key);
    if (it == Setters().end()) {
      Invalid("line " + std::to_string(line_no) + ": unknown key '" +
              std::string(key) + "'");
    }
    it->second(config, value);
  }
  return config;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::string text;
  try {
    text = ReadTextFile(path);
  } catch (const Error& e) {
    Invalid("cannot read config file " + path.string());
  }
  return ParseConfig(text);
}

std::size_t EffectiveRuns(const ExperimentConfig& config) {
  if (config.runs) return *config.runs;
  switch (config.kind) {
    case ExperimentKind::kSimulate: return 1000;
    case ExperimentKind::kSweepS: return config.paper_scale ? 10000 : 1000;
    case ExperimentKind::kTradeoff: return 100;
    case ExperimentKind::kHistogram:
      return config.paper_scale ? 1000000 : 10000;
    case ExperimentKind::kRate: return config.paper_scale ? 100 : 50;
  }
  return 1000;
}

std::size_t EffectiveHorizon(const ExperimentConfig& config) {
  if (config.horizon) return *config.horizon;
  return config.kind == ExperimentKind::kRate ? 100 : 500;
}

std::size_t EffectiveInitialConditions(const ExperimentConfig& config) {
  if (config.initial_conditions) return *config.initial_conditions;
  return config.paper_scale ? 50 : 20;
}

void ValidateConfig(const ExperimentConfig& config) {
  if (config.graph_file.empty()) {
    if (config.n < 2) Invalid("n must be at least 2");
    if (!(config.edge_p > 0.0 && config.edge_p < 1.0)) {
      Invalid("edge_p must lie in (0, 1)");
    }
  }
  if (config.state_file.empty() && !(config.state_variance >= 0.0)) {
    Invalid("state_variance must be non-negative");
  }
  if (config.step_size && !(*config.step_size > 0.0)) {
    Invalid("step_size must be positive");
  }
  if (!(config.delta > 0.0)) Invalid("delta must be positive");
  if (config.s.empty() || config.q.empty() || config.epsilon.empty()) {
    Invalid("s, q and epsilon need at least one value");
  }
  if (config.c && config.c->empty()) Invalid("c needs at least one value");
  if (EffectiveRuns(config) < 1) Invalid("runs must be at least 1");
  if (EffectiveHorizon(config) < 1) Invalid("horizon must be at least 1");
  if (!(config.settle_tolerance > 0.0)) {
    Invalid("settle_tolerance must be positive");
  }
  if (config.conservation_stride < 1) {
    Invalid("conservation_stride must be at least 1");
  }
  if (config.bins < 1) Invalid("bins must be at least 1");
  if (EffectiveInitialConditions(config) < 1) {
    Invalid("initial_conditions must be at least 1");
  }
  for (double p : config.accuracy_p) {
    if (!(p > 0.0 && p < 1.0)) Invalid("accuracy_p entries must lie in (0, 1)");
  }
  if (config.graph_file.empty()) {
    CheckPerAgent(config.s, config.n, "s");
    CheckPerAgent(config.q, config.n, "q");
    CheckPerAgent(config.epsilon, config.n, "epsilon");
    if (config.c) CheckPerAgent(*config.c, config.n, "c");
  }
}

nlohmann::ordered_json ConfigToJson(const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  j["kind"] = ExperimentKindName(config.kind);
  if (config.graph_file.empty()) {
    j["graph"] = {{"source", "random"},
                  {"n", config.n},
                  {"edge_p", config.edge_p},
                  {"graph_seed", config.graph_seed}};
  } else {
    j["graph"] = {{"source", "file"}, {"graph_file", config.graph_file}};
  }
  if (config.state_file.empty()) {
    j["initial_state"] = {{"source", "gaussian"},
                          {"state_mean", config.state_mean},
                          {"state_variance", config.state_variance},
                          {"state_seed", config.state_seed}};
  } else {
    j["initial_state"] = {{"source", "file"},
                          {"state_file", config.state_file}};
  }
  if (config.step_size) {
    j["step_size"] = *config.step_size;
  } else {
    j["step_size"] = "auto";
  }
  j["delta"] = config.delta;
  j["epsilon"] = config.epsilon;
  j["s"] = config.s;
  j["q"] = config.q;
  if (config.c) {
    j["c"] = *config.c;
  } else {
    j["c"] = "auto";
  }
  j["runs"] = EffectiveRuns(config);
  j["horizon"] = EffectiveHorizon(config);
  j["master_seed"] = config.master_seed;
  j["settle_tolerance"] = config.settle_tolerance;
  j["conservation_stride"] = config.conservation_stride;
  switch (config.kind) {
    case ExperimentKind::kSweepS:
      j["s_grid"] = config.s_grid;
      j["s_min"] = config.s_min;
      j["s_max"] = config.s_max;
      j["s_points"] = config.s_points;
      j["alpha"] = config.alpha;
      break;
    case ExperimentKind::kTradeoff:
      j["epsilon_grid"] = config.epsilon_grid;
      j["epsilon_min"] = config.epsilon_min;
      j["epsilon_max"] = config.epsilon_max;
      j["epsilon_points"] = config.epsilon_points;
      break;
    case ExperimentKind::kHistogram:
      j["bins"] = config.bins;
      break;
    case ExperimentKind::kRate:
      j["initial_conditions"] = EffectiveInitialConditions(config);
      break;
    case ExperimentKind::kSimulate:
      break;
  }
  j["accuracy_p"] = config.accuracy_p;
  j["paper_scale"] = config.paper_scale;
  return j;
}

}  // namespace dpcons
