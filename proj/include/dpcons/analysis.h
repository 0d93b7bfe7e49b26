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

// Closed-form guarantees of the perturbed consensus dynamics: per-agent
// privacy level, variance and Chebyshev radius of the agreement value,
// mean-square convergence rate, and the optimal privacy/accuracy cost.

#ifndef DPCONS_ANALYSIS_H_
#define DPCONS_ANALYSIS_H_

#include <string>
#include <vector>

#include "dpcons/graph.h"
#include "dpcons/matrix.h"
#include "dpcons/noise.h"

namespace dpcons {

// Agents whose decay ratio sits within this distance of |s - 1| are
// rejected by the privacy formulas, which diverge at that boundary.
inline constexpr double kDecayGuardBand = 1e-12;

struct PrivacySpec {
  double delta = 1.0;
  Vector epsilon;  // per agent, all > 0

  static PrivacySpec Uniform(std::size_t n, double epsilon, double delta) {
    return {delta, Vector(n, epsilon)};
  }
};

// Throws kInvalidParameters for non-positive or non-finite entries.
void ValidatePrivacySpec(const PrivacySpec& privacy);

// epsilon_i = delta q_i / (c_i (q_i - |s_i - 1|)); delta / c_i at the
// one-shot point. Throws kInvalidSchedule or kInvalidParameters.
double AgentEpsilon(const AgentNoise& agent, double delta);
Vector EpsilonOf(const NoiseSchedule& schedule, double delta);
// Network-level level max_i epsilon_i.
double NetworkEpsilon(const NoiseSchedule& schedule, double delta);

// Initial scale c that yields `epsilon` for the given (s, q); the exact
// inverse of AgentEpsilon. Throws kInvalidParameters.
double ScaleForEpsilon(double epsilon, double delta, double s, double q);

// Builds a schedule with c_i calibrated from the privacy spec.
NoiseSchedule CalibratedSchedule(const PrivacySpec& privacy,
                                 std::span<const double> s,
                                 std::span<const double> q);

// var(theta_inf) = (2 / n^2) sum_i s_i^2 c_i^2 / (1 - q_i^2).
double LimitVariance(const NoiseSchedule& schedule);

// r = sqrt(var / p): P(|theta_inf - <theta0>| <= r) >= 1 - p.
// Throws kInvalidProbability unless p in (0, 1).
double AccuracyRadius(const NoiseSchedule& schedule, double p);

struct RateSummary {
  double mu = 0.0;
  double q_bar = 0.0;
  double lambda_bar = 0.0;
};

// mu = max(max_i q_i, lambda_bar). Errors from ComputeSpectralSummary.
RateSummary ConvergenceRate(const NoiseSchedule& schedule,
                            const WeightedGraph& graph, double h);
RateSummary CombineRate(const NoiseSchedule& schedule, double lambda_bar);

// Variance as a function of the privacy levels and the free (s, q) pairs:
// (2 delta^2 / n^2) sum_i s_i^2 q_i^2 /
//     (eps_i^2 (q_i - |s_i - 1|)^2 (1 - q_i^2)).
double TradeoffVariance(const PrivacySpec& privacy, std::span<const double> s,
                        std::span<const double> q);

// alpha = (q - |s - 1|) / (1 - |s - 1|) and its inverse.
double AlphaFromDecay(double q, double s);
double DecayFromAlpha(double alpha, double s);

// Per-agent cost factor over (alpha, s) in (0,1) x (0,2); the variance is
// (2 delta^2 / n^2) sum_i phi(alpha_i, s_i) / eps_i^2. Throws
// kDomainViolation outside the open domain.
double Phi(double alpha, double s);

// J* = (2 delta^2 / n^2) sum_i 1 / eps_i^2, attained by one-shot noise.
double OptimalCost(const PrivacySpec& privacy);

// One-shot schedule (s = 1, q = 0, c_i = delta / eps_i) attaining J*.
NoiseSchedule OptimalSchedule(const PrivacySpec& privacy);

// Schedule with s = 1 and decay q > 0 whose cost approaches J* as q -> 0.
NoiseSchedule ApproachingSchedule(const PrivacySpec& privacy, double q);

struct AccuracyPair {
  double p = 0.0;
  double r = 0.0;
};

struct GuaranteeReport {
  Vector epsilon;
  double network_epsilon = 0.0;
  double limit_variance = 0.0;
  double optimal_cost = 0.0;  // J* at the reported epsilons
  std::vector<AccuracyPair> accuracy;
  RateSummary rate;
};

GuaranteeReport MakeGuaranteeReport(const NoiseSchedule& schedule,
                                    double delta, const WeightedGraph& graph,
                                    double h,
                                    std::span<const double> probabilities);

std::string GuaranteeReportJson(const GuaranteeReport& report);

// Rows (epsilon, predicted_variance, J_star) for a uniform privacy level
// swept over `epsilons` with every agent using gain s and decay q.
std::string TradeoffCurveCsv(std::size_t n, double delta, double s, double q,
                             std::span<const double> epsilons);

}  // namespace dpcons

#endif  // DPCONS_ANALYSIS_H_
