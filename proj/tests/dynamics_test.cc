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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "dpcons/analysis.h"
#include "dpcons/error.h"
#include "dpcons/rng.h"

namespace dpcons {
namespace {

WeightedGraph Pair() {
  return WeightedGraph::FromAdjacency(Matrix::FromRows({{0, 1}, {1, 0}}));
}

AlgorithmParams Params(double h, std::size_t n, AgentNoise agent) {
  return {h, NoiseSchedule::Uniform(n, agent), 1.0};
}

NoiseRecord ZeroRecord(const NoiseSchedule& schedule, std::size_t horizon) {
  return {Matrix(schedule.size(), horizon + 1), schedule, 0};
}

Vector RandomState(std::size_t n, std::uint64_t key) {
  const CounterStream s(key);
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 50.0 + 10.0 * s.StandardNormal(i);
  return v;
}

double Norm(std::span<const double> v, double center) {
  double acc = 0.0;
  for (double x : v) acc += (x - center) * (x - center);
  return std::sqrt(acc);
}

TEST(StepTest, HandComputedPair) {
  const AlgorithmParams p = Params(0.25, 2, {1.0, 1.0, 0.0});
  const Vector theta{1.0, 0.0};
  const Vector eta{0.2, -0.1};
  const StepResult r = Step(theta, p, Pair(), eta);
  EXPECT_DOUBLE_EQ(r.message[0], 1.2);
  EXPECT_DOUBLE_EQ(r.message[1], -0.1);
  EXPECT_NEAR(r.theta_next[0], 0.875, 1e-15);
  EXPECT_NEAR(r.theta_next[1], 0.225, 1e-15);

  // Independent oracle: theta - h L x + S eta with an explicit Laplacian.
  const Vector lx = Multiply(Laplacian(Pair()), r.message);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(r.theta_next[i], theta[i] - 0.25 * lx[i] + eta[i], 1e-15);
  }
}

TEST(StepTest, ConsensusIsFixedAndAverageKept) {
  const WeightedGraph g = RandomGraph(20, 0.2, 3);
  const AlgorithmParams p =
      Params(DefaultStepSize(g), 20, {1.0, 1.0, 0.0});
  const Vector zero(20, 0.0);
  const Vector flat(20, 3.5);
  EXPECT_EQ(Step(flat, p, g, zero).theta_next, flat);

  const Vector theta = RandomState(20, 1);
  const Vector next = Step(theta, p, g, zero).theta_next;
  EXPECT_NEAR(Mean(next), Mean(theta), 1e-12);
}

TEST(StepTest, RejectsWrongSizes) {
  const AlgorithmParams p = Params(0.25, 2, {1.0, 1.0, 0.0});
  try {
    Step(Vector{1.0}, p, Pair(), Vector{0.0, 0.0});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(StepTest, StateSpaceFormAgrees) {
  for (std::uint64_t t = 0; t < 10; ++t) {
    const WeightedGraph g = RandomGraph(30, 0.15, t);
    const AlgorithmParams p = Params(0.9 / g.max_degree(), 30,
                                     {0.8 + 0.04 * t, 2.0, 0.9});
    const Vector theta = RandomState(30, DeriveKey(t, 1));
    const Vector eta = RandomState(30, DeriveKey(t, 2));
    const Vector a = Step(theta, p, g, eta).theta_next;
    const Vector b = StepStateSpace(theta, p, g, eta);
    for (std::size_t i = 0; i < 30; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  }
}

TEST(StepComparisonTest, MatchesStepWhenGainIsDegreeTimesStep) {
  const WeightedGraph g = RandomGraph(25, 0.2, 4);
  const double h = DefaultStepSize(g);
  std::vector<AgentNoise> agents;
  for (std::size_t i = 0; i < 25; ++i) {
    const double s = g.degree(i) * h;
    agents.push_back({s, 1.0, std::abs(s - 1.0) + 0.5 * (1 - std::abs(s - 1.0))});
  }
  const AlgorithmParams p{h, NoiseSchedule::Create(agents), 1.0};
  const Vector theta = RandomState(25, 8);
  const Vector eta = RandomState(25, 9);
  const Vector a = StepComparison(theta, p, g, eta);
  const Vector b = Step(theta, p, g, eta).theta_next;
  for (std::size_t i = 0; i < 25; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(StepComparisonTest, HandExamples) {
  const AlgorithmParams p = Params(0.25, 2, {0.5, 1.0, 0.6});
  const Vector next =
      StepComparison(Vector{1.0, 0.0}, p, Pair(), Vector{0.0, 0.0});
  EXPECT_EQ(next, (Vector{0.5, 0.5}));
  const Vector flat =
      StepComparison(Vector{2.0, 2.0}, p, Pair(), Vector{0.0, 0.0});
  EXPECT_EQ(flat, (Vector{2.0, 2.0}));
}

TEST(StepComparisonTest, IsolatedNodeRejected) {
  const WeightedGraph g = WeightedGraph::FromAdjacency(
      Matrix::FromRows({{0, 1, 0}, {1, 0, 0}, {0, 0, 0}}));
  const AlgorithmParams p = Params(0.25, 3, {1.0, 1.0, 0.0});
  try {
    StepComparison(Vector(3, 0.0), p, g, Vector(3, 0.0));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIsolatedNode);
  }
}

TEST(RealizedLimitTest, Examples) {
  const NoiseSchedule s = NoiseSchedule::Uniform(2, {1.0, 1.0, 0.0});
  EXPECT_EQ(RealizedLimit(Vector{1.0, 2.0}, s, ZeroRecord(s, 5)), 1.5);
  NoiseRecord r = ZeroRecord(s, 3);
  r.eta(0, 0) = 0.4;
  r.eta(1, 0) = -0.2;
  EXPECT_NEAR(RealizedLimit(Vector{1.0, 2.0}, s, r), 1.6, 1e-15);
}

TEST(RunTest, SettlingOnTwoNodePair) {
  // Disagreement halves every round: max deviation is 0.5^(k+1), which
  // first drops below 1e-2 at k = 6.
  const AlgorithmParams p = Params(0.25, 2, {1.0, 1.0, 0.0});
  RunOptions opt;
  opt.settle_tolerance = 1e-2;
  const TrajectoryRecord t =
      dpcons::Run(Vector{1.0, 0.0}, p, Pair(), ZeroRecord(p.schedule, 20), opt);
  ASSERT_TRUE(t.settling_round.has_value());
  EXPECT_EQ(*t.settling_round, 6u);
  EXPECT_NEAR(t.max_deviation[6], 0.0078125, 1e-15);
  EXPECT_GT(t.max_deviation[5], 1e-2);
  EXPECT_EQ(SettlingTime(t, 1.0), 0u);  // tolerance above initial spread
}

TEST(RunTest, ConsensusStartSettlesImmediately) {
  const AlgorithmParams p = Params(0.25, 2, {1.0, 1.0, 0.0});
  const TrajectoryRecord t =
      dpcons::Run(Vector{4.0, 4.0}, p, Pair(), ZeroRecord(p.schedule, 5));
  EXPECT_EQ(t.settling_round, 0u);
}

TEST(RunTest, NeverSettlingReportsNothing) {
  const AlgorithmParams p = Params(0.01, 2, {1.0, 1.0, 0.0});
  const TrajectoryRecord t =
      dpcons::Run(Vector{1.0, 0.0}, p, Pair(), ZeroRecord(p.schedule, 3));
  EXPECT_FALSE(t.settling_round.has_value());
}

TEST(RunTest, MessagesAreStatePlusNoiseAndAverageIdentityHolds) {
  const WeightedGraph g = RandomGraph(50, 0.1, 11);
  const AlgorithmParams p =
      Params(DefaultStepSize(g), 50, {0.9, 3.0, 0.4});
  const Vector theta0 = RandomState(50, 5);
  const TrajectoryRecord t =
      dpcons::Run(theta0, p, g, GenerateNoiseRecord(p.schedule, 120, 17));
  const Vector curve = AverageCurve(theta0, p.schedule, t.record, 120);
  for (std::size_t k = 0; k <= 120; ++k) {
    for (std::size_t i = 0; i < 50; ++i) {
      EXPECT_EQ(t.x(i, k), t.theta(i, k) + t.record.eta(i, k));
    }
    EXPECT_NEAR(t.average[k], curve[k], 1e-10);
    EXPECT_EQ(curve[k], AverageAfter(theta0, p.schedule, t.record, k));
  }
  // The realized limit is the identity one round past the horizon.
  EXPECT_EQ(t.realized_limit,
            AverageCurve(theta0, p.schedule, t.record, 121).back());
}

TEST(RunTest, ReplayIsBitIdentical) {
  const WeightedGraph g = RandomGraph(30, 0.15, 2);
  const AlgorithmParams p = Params(DefaultStepSize(g), 30, {1.1, 1.0, 0.5});
  const Vector theta0 = RandomState(30, 3);
  const TrajectoryRecord a =
      dpcons::Run(theta0, p, g, GenerateNoiseRecord(p.schedule, 60, 4));
  const TrajectoryRecord b = dpcons::Run(theta0, p, g, a.record);
  EXPECT_EQ(a.theta, b.theta);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.realized_limit, b.realized_limit);
}

TEST(RunTest, StreamingModeKeepsSummaries) {
  const WeightedGraph g = RandomGraph(30, 0.15, 2);
  const AlgorithmParams p = Params(DefaultStepSize(g), 30, {1.0, 1.0, 0.0});
  const Vector theta0 = RandomState(30, 3);
  const NoiseRecord r = GenerateNoiseRecord(p.schedule, 40, 4);
  RunOptions lean;
  lean.store_history = false;
  const TrajectoryRecord a = dpcons::Run(theta0, p, g, r);
  const TrajectoryRecord b = dpcons::Run(theta0, p, g, r, lean);
  EXPECT_EQ(b.theta.cols(), 0u);
  EXPECT_EQ(a.average, b.average);
  EXPECT_EQ(a.max_deviation, b.max_deviation);
  EXPECT_EQ(a.final_state, b.final_state);
  EXPECT_THROW(FormatTrajectoryCsv(b), Error);
}

TEST(RunTest, LongRunReachesRealizedLimit) {
  const WeightedGraph g = RandomGraph(50, 0.1, 1);
  const PrivacySpec privacy = PrivacySpec::Uniform(50, 0.1, 1.0);
  const AlgorithmParams p{DefaultStepSize(g), OptimalSchedule(privacy), 1.0};
  const Vector theta0 = RandomState(50, 6);
  const TrajectoryRecord t =
      dpcons::Run(theta0, p, g, GenerateNoiseRecord(p.schedule, 500, 8));
  for (double v : t.final_state) EXPECT_NEAR(v, t.realized_limit, 1e-8);
}

TEST(RunTest, ScheduleMismatchAndShortRecord) {
  const AlgorithmParams p = Params(0.25, 2, {1.0, 1.0, 0.0});
  const NoiseSchedule other = NoiseSchedule::Uniform(2, {1.0, 2.0, 0.0});
  try {
    dpcons::Run(Vector{1.0, 0.0}, p, Pair(), ZeroRecord(other, 5));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kScheduleMismatch);
  }
  RunOptions opt;
  opt.steps = 10;
  try {
    dpcons::Run(Vector{1.0, 0.0}, p, Pair(), ZeroRecord(p.schedule, 5), opt);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(RunTest, NoiselessContractionBound) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const WeightedGraph g = RandomGraph(30, 0.15, seed);
    const double h = DefaultStepSize(g);
    const double lambda = ComputeSpectralSummary(g, h).lambda_bar;
    const AlgorithmParams p = Params(h, 30, {1.0, 1.0, 0.0});
    const Vector theta0 = RandomState(30, DeriveKey(seed, 3));
    const TrajectoryRecord t =
        dpcons::Run(theta0, p, g, ZeroRecord(p.schedule, 100));
    const double avg = Mean(theta0);
    const double d0 = Norm(theta0, avg);
    for (std::size_t k = 0; k <= 100; ++k) {
      const double dk = Norm(t.theta.column(k), avg);
      EXPECT_LE(dk, std::pow(lambda, k) * d0 * (1.0 + 1e-9) + 1e-12)
          << "seed " << seed << " round " << k;
    }
  }
}

TEST(RunTest, MeanSquareErrorDecreasesWithHorizon) {
  const WeightedGraph g = RandomGraph(50, 0.1, 1);
  const PrivacySpec privacy = PrivacySpec::Uniform(50, 0.1, 1.0);
  const Vector s(50, 0.9), q(50, 0.2);
  const AlgorithmParams p{DefaultStepSize(g),
                          CalibratedSchedule(privacy, s, q), 1.0};
  const Vector theta0 = RandomState(50, 2);
  const std::size_t ks[] = {25, 50, 100};
  double sums[3] = {0, 0, 0};
  RunOptions opt;
  opt.store_history = false;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    const TrajectoryRecord t =
        dpcons::Run(theta0, p, g, GenerateNoiseRecord(p.schedule, 100, r), opt);
    for (int j = 0; j < 3; ++j) sums[j] += t.squared_deviation[ks[j]];
  }
  EXPECT_GT(sums[0], sums[1]);
  EXPECT_GT(sums[1], sums[2]);
}

TEST(TrajectoryExportTest, CsvShapeAndMetadata) {
  const AlgorithmParams p = Params(0.25, 2, {1.0, 1.0, 0.0});
  const TrajectoryRecord t =
      dpcons::Run(Vector{1.0, 0.0}, p, Pair(), GenerateNoiseRecord(p.schedule, 3, 1));
  const std::string csv = FormatTrajectoryCsv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "round,agent,theta,x,eta");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 4 * 2);
  const auto meta = nlohmann::json::parse(TrajectoryMetadataJson(t, p));
  EXPECT_EQ(meta["seed"].get<int>(), 1);
  EXPECT_EQ(meta["realized_limit"].get<double>(), t.realized_limit);
  EXPECT_TRUE(meta.contains("settling_round"));
  EXPECT_TRUE(meta.contains("limit_tail_bound"));
}

}  // namespace
}  // namespace dpcons
