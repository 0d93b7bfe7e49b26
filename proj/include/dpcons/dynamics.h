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

// Noise-perturbed Laplacian consensus:
//
//   x(k)     = theta(k) + eta(k)
//   theta(k+1) = theta(k) - h L x(k) + S eta(k)
//
// Each agent only needs its neighbors' messages x_j(k); S = diag(s_i).

#ifndef DPCONS_DYNAMICS_H_
#define DPCONS_DYNAMICS_H_

#include <optional>
#include <span>
#include <string>

#include "dpcons/graph.h"
#include "dpcons/matrix.h"
#include "dpcons/noise.h"

namespace dpcons {

struct AlgorithmParams {
  double step_size = 0.0;  // h, must satisfy h * d_max < 1
  NoiseSchedule schedule;
  double delta = 1.0;      // adjacency bound on initial states
};

// Throws kInvalidParameters, kStepSizeTooLarge or kDimensionMismatch.
void ValidateParams(const AlgorithmParams& params, const WeightedGraph& graph);

struct StepResult {
  Vector theta_next;
  Vector message;
};

// One synchronous round. Throws kDimensionMismatch.
StepResult Step(std::span<const double> theta, const AlgorithmParams& params,
                const WeightedGraph& graph, std::span<const double> eta);

// Same round written as theta(k+1) = (I - hL) theta(k) + (S - hL) eta(k)
// with a dense Laplacian. Kept as an independent route for cross-checks.
Vector StepStateSpace(std::span<const double> theta,
                      const AlgorithmParams& params,
                      const WeightedGraph& graph,
                      std::span<const double> eta);

// Comparison update theta(k+1) = (I - S) theta(k) + S D^-1 A x(k). With
// s_i = d_i h it coincides with Step. Throws kIsolatedNode.
Vector StepComparison(std::span<const double> theta,
                      const AlgorithmParams& params,
                      const WeightedGraph& graph,
                      std::span<const double> eta);

// <theta0> + sum_i (s_i/n) sum_{j<rounds} eta_i(j): the network average
// after `rounds` steps. Requires rounds <= horizon + 1.
double AverageAfter(std::span<const double> theta0,
                    const NoiseSchedule& schedule, const NoiseRecord& record,
                    std::size_t rounds);

// AverageAfter for every round count 0..rounds in one pass; entry k is
// bitwise equal to AverageAfter(theta0, schedule, record, k).
Vector AverageCurve(std::span<const double> theta0,
                    const NoiseSchedule& schedule, const NoiseRecord& record,
                    std::size_t rounds);

// Agreement value implied by the whole record (rounds 0..horizon). The
// untracked remainder is bounded by TailBound(schedule, horizon).
double RealizedLimit(std::span<const double> theta0,
                     const NoiseSchedule& schedule, const NoiseRecord& record);

// Same value from precomputed per-agent noise sums (see NoiseRowSums).
double LimitFromNoiseSums(double initial_average,
                          const NoiseSchedule& schedule,
                          std::span<const double> noise_sums);

struct RunOptions {
  // Number of steps; defaults to the record horizon.
  std::optional<std::size_t> steps;
  // When false, theta/x histories are not kept; the per-round summaries
  // below are still filled.
  bool store_history = true;
  double settle_tolerance = 1e-2;
};

struct TrajectoryRecord {
  Matrix theta;  // n x (K+1), empty unless store_history
  Matrix x;      // n x (K+1), empty unless store_history
  NoiseRecord record;
  double realized_limit = 0.0;
  double limit_tail_bound = 0.0;
  std::optional<std::size_t> settling_round;

  Vector final_state;
  Vector average;            // <theta(k)>, k = 0..K
  Vector max_deviation;      // max_i |theta_i(k) - realized_limit|
  Vector squared_deviation;  // ||theta(k) - realized_limit * 1||^2

  std::size_t steps() const { return average.size() - 1; }
};

// Rolls the dynamics forward over the record. Throws kScheduleMismatch if
// the record was generated for a different schedule, kDimensionMismatch
// for a wrong theta0 size or a too-short record.
TrajectoryRecord Run(std::span<const double> theta0,
                     const AlgorithmParams& params, const WeightedGraph& graph,
                     NoiseRecord record, const RunOptions& options = {});

// First round k after which every agent stays within tol of the realized
// limit through the end of the trajectory.
std::optional<std::size_t> SettlingTime(const TrajectoryRecord& trajectory,
                                        double tol);

// CSV with columns round, agent, theta, x, eta (requires stored history)
// and the per-run JSON sidecar.
std::string FormatTrajectoryCsv(const TrajectoryRecord& trajectory);
std::string TrajectoryMetadataJson(const TrajectoryRecord& trajectory,
                                   const AlgorithmParams& params);

}  // namespace dpcons

#endif  // DPCONS_DYNAMICS_H_
