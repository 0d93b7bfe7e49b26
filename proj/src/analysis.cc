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

#include "dpcons/analysis.h"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "dpcons/error.h"
#include "dpcons/io.h"

namespace dpcons {

namespace {

bool IsOneShot(double s, double q) { return q == 0.0 && s == 1.0; }

// Throws unless (s, q) is the one-shot point or q sits strictly inside
// (|s - 1|, 1) by more than the guard band.
void CheckGainDecay(double s, double q, ErrorCode code) {
  if (!std::isfinite(s) || !std::isfinite(q) || !(s > 0.0 && s < 2.0)) {
    throw Error(code, "gain s must lie in (0, 2)");
  }
  if (IsOneShot(s, q)) return;
  if (!(q < 1.0) || !(q - std::abs(s - 1.0) >= kDecayGuardBand)) {
    throw Error(code, "decay q = " + FormatDouble(q) +
                          " must lie in (|s - 1|, 1) for s = " +
                          FormatDouble(s));
  }
}

void CheckEpsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::kInvalidParameters,
                "privacy level must be positive and finite");
  }
}

void CheckDelta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorCode::kInvalidParameters,
                "adjacency bound must be positive and finite");
  }
}

double SquareOf(double v) { return v * v; }

}  // namespace

void ValidatePrivacySpec(const PrivacySpec& privacy) {
  CheckDelta(privacy.delta);
  if (privacy.epsilon.empty()) {
    throw Error(ErrorCode::kInvalidParameters, "no privacy levels given");
  }
  for (double e : privacy.epsilon) CheckEpsilon(e);
}

double AgentEpsilon(const AgentNoise& agent, double delta) {
  CheckDelta(delta);
  CheckGainDecay(agent.s, agent.q, ErrorCode::kInvalidSchedule);
  if (!(agent.c > 0.0)) {
    throw Error(ErrorCode::kInvalidSchedule, "scale c must be positive");
  }
  if (agent.one_shot()) return delta / agent.c;
  return delta * agent.q / (agent.c * (agent.q - std::abs(agent.s - 1.0)));
}

Vector EpsilonOf(const NoiseSchedule& schedule, double delta) {
  Vector out;
  out.reserve(schedule.size());
  for (const AgentNoise& a : schedule.agents()) {
    out.push_back(AgentEpsilon(a, delta));
  }
  return out;
}

double NetworkEpsilon(const NoiseSchedule& schedule, double delta) {
  const Vector eps = EpsilonOf(schedule, delta);
  return *std::max_element(eps.begin(), eps.end());
}

double ScaleForEpsilon(double epsilon, double delta, double s, double q) {
  CheckEpsilon(epsilon);
  CheckDelta(delta);
  CheckGainDecay(s, q, ErrorCode::kInvalidParameters);
  if (IsOneShot(s, q)) return delta / epsilon;
  return delta * q / (epsilon * (q - std::abs(s - 1.0)));
}

NoiseSchedule CalibratedSchedule(const PrivacySpec& privacy,
                                 std::span<const double> s,
                                 std::span<const double> q) {
  ValidatePrivacySpec(privacy);
  const std::size_t n = privacy.epsilon.size();
  if (s.size() != n || q.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "gain/decay vectors must match the privacy spec length");
  }
  std::vector<AgentNoise> agents(n);
  for (std::size_t i = 0; i < n; ++i) {
    agents[i] = {s[i], ScaleForEpsilon(privacy.epsilon[i], privacy.delta,
                                       s[i], q[i]),
                 q[i]};
  }
  return NoiseSchedule::Create(std::move(agents));
}

double LimitVariance(const NoiseSchedule& schedule) {
  const double n = static_cast<double>(schedule.size());
  double acc = 0.0;
  for (const AgentNoise& a : schedule.agents()) {
    acc += SquareOf(a.s * a.c) / (1.0 - a.q * a.q);
  }
  return 2.0 * acc / (n * n);
}

double AccuracyRadius(const NoiseSchedule& schedule, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kInvalidProbability,
                "probability p must lie in (0, 1)");
  }
  return std::sqrt(LimitVariance(schedule) / p);
}

RateSummary CombineRate(const NoiseSchedule& schedule, double lambda_bar) {
  RateSummary out;
  for (const AgentNoise& a : schedule.agents()) {
    out.q_bar = std::max(out.q_bar, a.q);
  }
  out.lambda_bar = lambda_bar;
  out.mu = std::max(out.q_bar, out.lambda_bar);
  return out;
}

RateSummary ConvergenceRate(const NoiseSchedule& schedule,
                            const WeightedGraph& graph, double h) {
  return CombineRate(schedule, ComputeSpectralSummary(graph, h).lambda_bar);
}

double TradeoffVariance(const PrivacySpec& privacy, std::span<const double> s,
                        std::span<const double> q) {
  ValidatePrivacySpec(privacy);
  const std::size_t n = privacy.epsilon.size();
  if (s.size() != n || q.size() != n) {
    throw Error(ErrorCode::kInvalidParameters,
                "gain/decay vectors must match the privacy spec length");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    CheckGainDecay(s[i], q[i], ErrorCode::kInvalidParameters);
    const double eps2 = SquareOf(privacy.epsilon[i]);
    if (IsOneShot(s[i], q[i])) {
      acc += SquareOf(1.0 / privacy.epsilon[i]);
      continue;
    }
    const double gap = q[i] - std::abs(s[i] - 1.0);
    acc += SquareOf(s[i] * q[i]) /
           (eps2 * SquareOf(gap) * (1.0 - q[i] * q[i]));
  }
  const double nn = static_cast<double>(n);
  return 2.0 * SquareOf(privacy.delta) * acc / (nn * nn);
}

double AlphaFromDecay(double q, double s) {
  const double t = std::abs(s - 1.0);
  return (q - t) / (1.0 - t);
}

double DecayFromAlpha(double alpha, double s) {
  const double t = std::abs(s - 1.0);
  return alpha + (1.0 - alpha) * t;
}

double Phi(double alpha, double s) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(s > 0.0 && s < 2.0)) {
    throw Error(ErrorCode::kDomainViolation,
                "phi is defined on (0, 1) x (0, 2)");
  }
  const double t = std::abs(s - 1.0);
  const double q = alpha + (1.0 - alpha) * t;
  return SquareOf(s * q) /
         (SquareOf(alpha * (1.0 - t)) * (1.0 - q * q));
}

double OptimalCost(const PrivacySpec& privacy) {
  ValidatePrivacySpec(privacy);
  const double n = static_cast<double>(privacy.epsilon.size());
  double acc = 0.0;
  for (double e : privacy.epsilon) acc += SquareOf(1.0 / e);
  return 2.0 * SquareOf(privacy.delta) * acc / (n * n);
}

NoiseSchedule OptimalSchedule(const PrivacySpec& privacy) {
  ValidatePrivacySpec(privacy);
  std::vector<AgentNoise> agents;
  for (double e : privacy.epsilon) {
    agents.push_back({1.0, privacy.delta / e, 0.0});
  }
  return NoiseSchedule::Create(std::move(agents));
}

NoiseSchedule ApproachingSchedule(const PrivacySpec& privacy, double q) {
  const Vector s(privacy.epsilon.size(), 1.0);
  const Vector qs(privacy.epsilon.size(), q);
  return CalibratedSchedule(privacy, s, qs);
}

GuaranteeReport MakeGuaranteeReport(const NoiseSchedule& schedule,
                                    double delta, const WeightedGraph& graph,
                                    double h,
                                    std::span<const double> probabilities) {
  GuaranteeReport out;
  out.epsilon = EpsilonOf(schedule, delta);
  out.network_epsilon = *std::max_element(out.epsilon.begin(),
                                          out.epsilon.end());
  out.limit_variance = LimitVariance(schedule);
  out.optimal_cost = OptimalCost({delta, out.epsilon});
  for (double p : probabilities) {
    out.accuracy.push_back({p, AccuracyRadius(schedule, p)});
  }
  out.rate = ConvergenceRate(schedule, graph, h);
  return out;
}

std::string GuaranteeReportJson(const GuaranteeReport& report) {
  nlohmann::ordered_json j;
  j["epsilon"] = report.epsilon;
  j["network_epsilon"] = report.network_epsilon;
  j["limit_variance"] = report.limit_variance;
  j["optimal_cost"] = report.optimal_cost;
  auto& acc = j["accuracy"] = nlohmann::ordered_json::array();
  for (const AccuracyPair& pr : report.accuracy) {
    acc.push_back({{"p", pr.p}, {"r", pr.r}});
  }
  j["mu"] = report.rate.mu;
  j["q_bar"] = report.rate.q_bar;
  j["lambda_bar"] = report.rate.lambda_bar;
  return j.dump(2) + "\n";
}

std::string TradeoffCurveCsv(std::size_t n, double delta, double s, double q,
                             std::span<const double> epsilons) {
  CsvWriter csv({"epsilon", "predicted_variance", "J_star"});
  const Vector gains(n, s);
  const Vector decays(n, q);
  for (double e : epsilons) {
    const PrivacySpec privacy = PrivacySpec::Uniform(n, e, delta);
    csv.Cell(e)
        .Cell(TradeoffVariance(privacy, gains, decays))
        .Cell(OptimalCost(privacy))
        .EndRow();
  }
  return csv.text();
}

}  // namespace dpcons
