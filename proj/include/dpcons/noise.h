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

// Laplace noise with geometrically decaying scale b_i(k) = c_i * q_i^k.

#ifndef DPCONS_NOISE_H_
#define DPCONS_NOISE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dpcons/matrix.h"

namespace dpcons {

// Per-agent noise parameters: gain s (state perturbation), initial scale c
// and decay ratio q.
struct AgentNoise {
  double s = 1.0;
  double c = 1.0;
  double q = 0.0;

  // q == 0 with s == 1: Laplace noise injected once, at round 0.
  bool one_shot() const { return q == 0.0 && s == 1.0; }

  friend bool operator==(const AgentNoise&, const AgentNoise&) = default;
};

// Validated list of AgentNoise. Each agent satisfies s in (0, 2), c > 0 and
// either q in (|s - 1|, 1) or the one-shot point (s = 1, q = 0).
class NoiseSchedule {
 public:
  NoiseSchedule() = default;  // empty, zero agents

  // Throws kInvalidSchedule naming the offending agent.
  static NoiseSchedule Create(std::vector<AgentNoise> agents);
  static NoiseSchedule Uniform(std::size_t n, AgentNoise agent) {
    return Create(std::vector<AgentNoise>(n, agent));
  }

  std::size_t size() const { return agents_.size(); }
  const AgentNoise& agent(std::size_t i) const { return agents_[i]; }
  const std::vector<AgentNoise>& agents() const { return agents_; }

  // b_i(k) = c_i q_i^k with 0^0 = 1. Throws kAgentOutOfRange.
  double ScaleAt(std::size_t i, std::uint64_t k) const;

  friend bool operator==(const NoiseSchedule&, const NoiseSchedule&) = default;

 private:
  explicit NoiseSchedule(std::vector<AgentNoise> agents)
      : agents_(std::move(agents)) {}
  std::vector<AgentNoise> agents_;
};

// Checks one agent's parameters, throwing kInvalidSchedule on violation.
void ValidateAgentNoise(const AgentNoise& agent, std::size_t index);

// Inverse-CDF transform of u in (-1/2, 1/2) to Lap(scale):
// -scale * sign(u) * ln(1 - 2|u|). Throws kNonpositiveScale.
double LaplaceSample(double scale, double u);

// Realized noise eta_i(k) for rounds 0..horizon.
struct NoiseRecord {
  Matrix eta;  // agents x (horizon + 1)
  NoiseSchedule schedule;
  std::uint64_t seed = 0;

  std::size_t horizon() const { return eta.cols() - 1; }
};

// Agent i draws round k from counter k of substream DeriveKey(seed, i);
// entries with b_i(k) = 0 are written as 0 without consuming a draw.
NoiseRecord GenerateNoiseRecord(const NoiseSchedule& schedule,
                                std::size_t horizon, std::uint64_t seed);

// Single entry of the record GenerateNoiseRecord would produce.
double NoiseAt(const NoiseSchedule& schedule, std::uint64_t seed,
               std::size_t agent, std::uint64_t round);

// Per-agent sums sum_{k=0..horizon} eta_i(k), bit-identical to summing the
// rows of GenerateNoiseRecord(schedule, horizon, seed) left to right, but
// without materializing the record. Stops early once b_i(k) reaches 0.
Vector NoiseRowSums(const NoiseSchedule& schedule, std::size_t horizon,
                    std::uint64_t seed);

// Expected-magnitude bound on the part of sum_i (s_i/n) sum_k eta_i(k)
// beyond the horizon: sum_i (s_i/n) c_i q_i^(K+1) / (1 - q_i).
double TailBound(const NoiseSchedule& schedule, std::size_t horizon);

// CSV (rows = agents, columns = rounds) and the JSON sidecar describing how
// to regenerate it.
std::string FormatNoiseCsv(const NoiseRecord& record);
std::string NoiseMetadataJson(const NoiseRecord& record);

}  // namespace dpcons

#endif  // DPCONS_NOISE_H_
