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

#include "dpcons/noise.h"

#include <cmath>

#include "json.hpp"

#include "dpcons/error.h"
#include "dpcons/io.h"
#include "dpcons/rng.h"

namespace dpcons {

void ValidateAgentNoise(const AgentNoise& a, std::size_t index) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kInvalidSchedule,
                "agent " + std::to_string(index) + ": " + what);
  };
  if (!std::isfinite(a.s) || !std::isfinite(a.c) || !std::isfinite(a.q)) {
    fail("parameters must be finite");
  }
  if (!(a.s > 0.0 && a.s < 2.0)) fail("s must lie in (0, 2)");
  if (!(a.c > 0.0)) fail("c must be positive");
  if (a.one_shot()) return;
  if (a.q == 0.0) fail("q = 0 is only allowed with s = 1");
  if (!(a.q > std::abs(a.s - 1.0) && a.q < 1.0)) {
    fail("q must lie in (|s - 1|, 1)");
  }
}

NoiseSchedule NoiseSchedule::Create(std::vector<AgentNoise> agents) {
  if (agents.empty()) {
    throw Error(ErrorCode::kInvalidSchedule, "schedule has no agents");
  }
  for (std::size_t i = 0; i < agents.size(); ++i) {
    ValidateAgentNoise(agents[i], i);
  }
  return NoiseSchedule(std::move(agents));
}

double NoiseSchedule::ScaleAt(std::size_t i, std::uint64_t k) const {
  if (i >= agents_.size()) {
    throw Error(ErrorCode::kAgentOutOfRange,
                "agent " + std::to_string(i) + " out of range");
  }
  const AgentNoise& a = agents_[i];
  if (k == 0) return a.c;
  return a.c * std::pow(a.q, static_cast<double>(k));
}

double LaplaceSample(double scale, double u) {
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::kNonpositiveScale, "Laplace scale must be > 0");
  }
  if (u == 0.0) return 0.0;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
  return u > 0.0 ? magnitude : -magnitude;
}

double NoiseAt(const NoiseSchedule& schedule, std::uint64_t seed,
               std::size_t agent, std::uint64_t round) {
  const double b = schedule.ScaleAt(agent, round);
  if (b == 0.0) return 0.0;
  const CounterStream stream(DeriveKey(seed, agent));
  return LaplaceSample(b, stream.UniformCentered(round));
}

NoiseRecord GenerateNoiseRecord(const NoiseSchedule& schedule,
                                std::size_t horizon, std::uint64_t seed) {
  const std::size_t n = schedule.size();
  NoiseRecord record{Matrix(n, horizon + 1), schedule, seed};
  for (std::size_t i = 0; i < n; ++i) {
    const CounterStream stream(DeriveKey(seed, i));
    auto row = record.eta.row(i);
    for (std::size_t k = 0; k <= horizon; ++k) {
      const double b = schedule.ScaleAt(i, k);
      if (b == 0.0) break;  // b_i(k) is nonincreasing; the rest stays 0
      row[k] = LaplaceSample(b, stream.UniformCentered(k));
    }
  }
  return record;
}

Vector NoiseRowSums(const NoiseSchedule& schedule, std::size_t horizon,
                    std::uint64_t seed) {
  const std::size_t n = schedule.size();
  Vector sums(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const CounterStream stream(DeriveKey(seed, i));
    double acc = 0.0;
    for (std::size_t k = 0; k <= horizon; ++k) {
      const double b = schedule.ScaleAt(i, k);
      if (b == 0.0) break;
      acc += LaplaceSample(b, stream.UniformCentered(k));
    }
    sums[i] = acc;
  }
  return sums;
}

double TailBound(const NoiseSchedule& schedule, std::size_t horizon) {
  const double n = static_cast<double>(schedule.size());
  double bound = 0.0;
  for (const AgentNoise& a : schedule.agents()) {
    if (a.q == 0.0) continue;
    bound += (a.s / n) * a.c *
             std::pow(a.q, static_cast<double>(horizon + 1)) / (1.0 - a.q);
  }
  return bound;
}

std::string FormatNoiseCsv(const NoiseRecord& record) {
  std::string out;
  for (std::size_t i = 0; i < record.eta.rows(); ++i) {
    const auto row = record.eta.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += FormatDouble(row[k]);
    }
    out += '\n';
  }
  return out;
}

std::string NoiseMetadataJson(const NoiseRecord& record) {
  nlohmann::ordered_json j;
  j["seed"] = record.seed;
  j["prng"] = kPrngAlgorithm;
  j["horizon"] = record.horizon();
  auto& agents = j["schedule"] = nlohmann::ordered_json::array();
  for (const AgentNoise& a : record.schedule.agents()) {
    agents.push_back({{"s", a.s}, {"c", a.c}, {"q", a.q}});
  }
  return j.dump(2) + "\n";
}

}  // namespace dpcons
