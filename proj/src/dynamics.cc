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

#include "dpcons/dynamics.h"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "dpcons/error.h"
#include "dpcons/io.h"
#include "dpcons/rng.h"

namespace dpcons {

namespace {

void RequireSize(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + " has " + std::to_string(got) +
                    " entries, expected " + std::to_string(want));
  }
}

void CheckStepInputs(std::span<const double> theta,
                     const AlgorithmParams& params, const WeightedGraph& graph,
                     std::span<const double> eta) {
  const std::size_t n = graph.size();
  RequireSize(theta.size(), n, "state");
  RequireSize(eta.size(), n, "noise");
  RequireSize(params.schedule.size(), n, "schedule");
}

}  // namespace

void ValidateParams(const AlgorithmParams& params, const WeightedGraph& graph) {
  const double h = params.step_size;
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::kInvalidParameters, "step size must be positive");
  }
  if (h * graph.max_degree() >= 1.0) {
    throw Error(ErrorCode::kStepSizeTooLarge,
                "step size " + FormatDouble(h) + " is not below 1/d_max = " +
                    FormatDouble(1.0 / graph.max_degree()));
  }
  if (!(params.delta > 0.0) || !std::isfinite(params.delta)) {
    throw Error(ErrorCode::kInvalidParameters,
                "adjacency bound delta must be positive");
  }
  RequireSize(params.schedule.size(), graph.size(), "schedule");
}

StepResult Step(std::span<const double> theta, const AlgorithmParams& params,
                const WeightedGraph& graph, std::span<const double> eta) {
  CheckStepInputs(theta, params, graph, eta);
  const std::size_t n = graph.size();
  const double h = params.step_size;
  StepResult out{Vector(n), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) out.message[i] = theta[i] + eta[i];
  for (std::size_t i = 0; i < n; ++i) {
    double lx = graph.degree(i) * out.message[i];
    for (const Neighbor& nb : graph.neighbors(i)) {
      lx -= nb.weight * out.message[nb.index];
    }
    out.theta_next[i] =
        theta[i] - h * lx + params.schedule.agent(i).s * eta[i];
  }
  return out;
}

Vector StepStateSpace(std::span<const double> theta,
                      const AlgorithmParams& params,
                      const WeightedGraph& graph,
                      std::span<const double> eta) {
  CheckStepInputs(theta, params, graph, eta);
  const std::size_t n = graph.size();
  const Matrix lap = Laplacian(graph);
  const double h = params.step_size;
  Matrix a(n, n);
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a(i, j) = (i == j ? 1.0 : 0.0) - h * lap(i, j);
      b(i, j) = (i == j ? params.schedule.agent(i).s : 0.0) - h * lap(i, j);
    }
  }
  Vector out = Multiply(a, theta);
  const Vector driven = Multiply(b, eta);
  for (std::size_t i = 0; i < n; ++i) out[i] += driven[i];
  return out;
}

Vector StepComparison(std::span<const double> theta,
                      const AlgorithmParams& params,
                      const WeightedGraph& graph,
                      std::span<const double> eta) {
  CheckStepInputs(theta, params, graph, eta);
  const std::size_t n = graph.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (graph.degree(i) == 0.0) {
      throw Error(ErrorCode::kIsolatedNode,
                  "agent " + std::to_string(i) + " has no neighbors");
    }
  }
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double ax = 0.0;
    for (const Neighbor& nb : graph.neighbors(i)) {
      ax += nb.weight * (theta[nb.index] + eta[nb.index]);
    }
    const double s = params.schedule.agent(i).s;
    out[i] = (1.0 - s) * theta[i] + s * ax / graph.degree(i);
  }
  return out;
}

double LimitFromNoiseSums(double initial_average,
                          const NoiseSchedule& schedule,
                          std::span<const double> noise_sums) {
  const double n = static_cast<double>(schedule.size());
  double shift = 0.0;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    shift += (schedule.agent(i).s / n) * noise_sums[i];
  }
  return initial_average + shift;
}

double AverageAfter(std::span<const double> theta0,
                    const NoiseSchedule& schedule, const NoiseRecord& record,
                    std::size_t rounds) {
  RequireSize(theta0.size(), schedule.size(), "initial state");
  if (rounds > record.eta.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "record is shorter than the requested round count");
  }
  Vector sums(schedule.size(), 0.0);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto row = record.eta.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < rounds; ++j) acc += row[j];
    sums[i] = acc;
  }
  return LimitFromNoiseSums(Mean(theta0), schedule, sums);
}

Vector AverageCurve(std::span<const double> theta0,
                    const NoiseSchedule& schedule, const NoiseRecord& record,
                    std::size_t rounds) {
  RequireSize(theta0.size(), schedule.size(), "initial state");
  if (rounds > record.eta.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "record is shorter than the requested round count");
  }
  const double initial_average = Mean(theta0);
  Vector prefix(schedule.size(), 0.0);
  Vector curve;
  curve.reserve(rounds + 1);
  for (std::size_t k = 0;; ++k) {
    curve.push_back(LimitFromNoiseSums(initial_average, schedule, prefix));
    if (k == rounds) break;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
      prefix[i] += record.eta(i, k);
    }
  }
  return curve;
}

double RealizedLimit(std::span<const double> theta0,
                     const NoiseSchedule& schedule, const NoiseRecord& record) {
  return AverageAfter(theta0, schedule, record, record.eta.cols());
}

TrajectoryRecord Run(std::span<const double> theta0,
                     const AlgorithmParams& params, const WeightedGraph& graph,
                     NoiseRecord record, const RunOptions& options) {
  ValidateParams(params, graph);
  const std::size_t n = graph.size();
  RequireSize(theta0.size(), n, "initial state");
  if (!(record.schedule == params.schedule)) {
    throw Error(ErrorCode::kScheduleMismatch,
                "noise record was generated for a different schedule");
  }
  const std::size_t steps = options.steps.value_or(record.horizon());
  if (steps > record.horizon()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "record horizon is shorter than the requested steps");
  }

  TrajectoryRecord out;
  out.realized_limit = RealizedLimit(theta0, params.schedule, record);
  out.limit_tail_bound = TailBound(params.schedule, record.horizon());
  if (options.store_history) {
    out.theta = Matrix(n, steps + 1);
    out.x = Matrix(n, steps + 1);
  }
  out.average.reserve(steps + 1);
  out.max_deviation.reserve(steps + 1);
  out.squared_deviation.reserve(steps + 1);

  Vector theta(theta0.begin(), theta0.end());
  Vector eta(n);
  for (std::size_t k = 0;; ++k) {
    double max_dev = 0.0;
    double sq_dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = theta[i] - out.realized_limit;
      max_dev = std::max(max_dev, std::abs(d));
      sq_dev += d * d;
    }
    out.average.push_back(Mean(theta));
    out.max_deviation.push_back(max_dev);
    out.squared_deviation.push_back(sq_dev);

    for (std::size_t i = 0; i < n; ++i) eta[i] = record.eta(i, k);
    if (k == steps) {
      if (options.store_history) {
        out.theta.set_column(k, theta);
        for (std::size_t i = 0; i < n; ++i) out.x(i, k) = theta[i] + eta[i];
      }
      break;
    }
    StepResult next = Step(theta, params, graph, eta);
    if (options.store_history) {
      out.theta.set_column(k, theta);
      out.x.set_column(k, next.message);
    }
    theta = std::move(next.theta_next);
  }
  out.final_state = std::move(theta);
  out.record = std::move(record);
  out.settling_round = SettlingTime(out, options.settle_tolerance);
  return out;
}

std::optional<std::size_t> SettlingTime(const TrajectoryRecord& trajectory,
                                        double tol) {
  if (!(tol > 0.0)) {
    throw Error(ErrorCode::kInvalidParameters,
                "settling tolerance must be positive");
  }
  const auto& dev = trajectory.max_deviation;
  std::size_t k = dev.size();
  while (k > 0 && dev[k - 1] <= tol) --k;
  if (k == dev.size()) return std::nullopt;
  return k;
}

std::string FormatTrajectoryCsv(const TrajectoryRecord& trajectory) {
  if (trajectory.theta.cols() == 0) {
    throw Error(ErrorCode::kInvalidParameters,
                "trajectory was recorded without history");
  }
  CsvWriter csv({"round", "agent", "theta", "x", "eta"});
  for (std::size_t k = 0; k < trajectory.theta.cols(); ++k) {
    for (std::size_t i = 0; i < trajectory.theta.rows(); ++i) {
      csv.Cell(static_cast<long long>(k))
          .Cell(static_cast<long long>(i))
          .Cell(trajectory.theta(i, k))
          .Cell(trajectory.x(i, k))
          .Cell(trajectory.record.eta(i, k))
          .EndRow();
    }
  }
  return csv.text();
}

std::string TrajectoryMetadataJson(const TrajectoryRecord& trajectory,
                                   const AlgorithmParams& params) {
  nlohmann::ordered_json j;
  j["seed"] = trajectory.record.seed;
  j["prng"] = kPrngAlgorithm;
  j["steps"] = trajectory.steps();
  j["noise_horizon"] = trajectory.record.horizon();
  j["step_size"] = params.step_size;
  j["delta"] = params.delta;
  auto& agents = j["schedule"] = nlohmann::ordered_json::array();
  for (const AgentNoise& a : params.schedule.agents()) {
    agents.push_back({{"s", a.s}, {"c", a.c}, {"q", a.q}});
  }
  j["realized_limit"] = trajectory.realized_limit;
  j["limit_tail_bound"] = trajectory.limit_tail_bound;
  if (trajectory.settling_round) {
    j["settling_round"] = *trajectory.settling_round;
  } else {
    j["settling_round"] = nullptr;
  }
  return j.dump(2) + "\n";
}

}  // namespace dpcons
