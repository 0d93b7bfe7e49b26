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

#include "dpcons/harness.h"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <filesystem>

#include "dpcons/error.h"
#include "dpcons/io.h"
#include "dpcons/rng.h"

namespace dpcons {
namespace {

ExperimentConfig Small(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.n = 12;
  c.edge_p = 0.3;
  c.runs = 40;
  c.horizon = 60;
  c.s_points = 5;
  c.epsilon_points = 3;
  c.initial_conditions = 3;
  c.conservation_stride = 7;
  return c;
}

TEST(ParallelForTest, VisitsEveryIndexOnce) {
  for (unsigned threads : {1u, 3u, 0u}) {
    std::vector<std::atomic<int>> hits(100);
    ParallelFor(100, threads, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  ParallelFor(0, 2, [](std::size_t) { FAIL(); });
}

TEST(ParallelForTest, ReportsSmallestFailingIndex) {
  try {
    ParallelFor(50, 1, [](std::size_t i) {
      if (i == 17 || i == 30) throw std::runtime_error("boom");
    });
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRunFailure);
    EXPECT_NE(std::string(e.what()).find("run 17"), std::string::npos);
  }
}

TEST(InitialStateTest, DeterministicGaussian) {
  const Vector a = GaussianInitialState(50, 50.0, 100.0, 2);
  EXPECT_EQ(a, GaussianInitialState(50, 50.0, 100.0, 2));
  EXPECT_NE(a, GaussianInitialState(50, 50.0, 100.0, 2, 1));
  EXPECT_NE(a, GaussianInitialState(50, 50.0, 100.0, 3));
  const Vector big = GaussianInitialState(100000, 50.0, 100.0, 9);
  const SampleMoments m = ComputeMoments(big);
  EXPECT_NEAR(m.mean, 50.0, 4.0 * 10.0 / std::sqrt(100000.0));
  EXPECT_NEAR(m.variance, 100.0, 2.0);
  EXPECT_EQ(GaussianInitialState(3, 7.0, 0.0, 1), Vector(3, 7.0));
}

TEST(GridTest, LogGridAndSweepGrid) {
  const Vector g = LogGrid(0.01, 100.0, 9);
  ASSERT_EQ(g.size(), 9u);
  EXPECT_EQ(g.front(), 0.01);
  EXPECT_EQ(g.back(), 100.0);
  for (std::size_t i = 1; i < 9; ++i) {
    EXPECT_NEAR(g[i] / g[i - 1], std::sqrt(10.0), 1e-12);
  }
  EXPECT_THROW(LogGrid(0.0, 1.0, 3), Error);
  EXPECT_THROW(LogGrid(1.0, 1.0, 3), Error);

  ExperimentConfig c;
  c.s_points = 20;  // even count: no grid point lands on 1 naturally
  const Vector s = SweepGrid(c);
  EXPECT_EQ(s.size(), 20u);
  EXPECT_EQ(std::count(s.begin(), s.end(), 1.0), 1);
  EXPECT_EQ(s.front(), 0.8);
  EXPECT_EQ(s.back(), 1.2);
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));

  c.s_grid = {0.5, 2.0};
  try {
    SweepGrid(c);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidGrid);
  }
  c.epsilon_grid = {1.0, -1.0};
  EXPECT_THROW(EpsilonGrid(c), Error);
}

TEST(LimitHorizonTest, TailBelowTarget) {
  const NoiseSchedule s = NoiseSchedule::Uniform(50, {1.0, 20.0, 0.97});
  const std::size_t k = LimitHorizon(s, 100);
  EXPECT_GE(k, 100u);
  EXPECT_LE(TailBound(s, k),
            1e-12 * (1.0 + std::sqrt(LimitVariance(s))));
  EXPECT_EQ(LimitHorizon(NoiseSchedule::Uniform(3, {1.0, 1.0, 0.0}), 10),
            10u);
}

class MonteCarloTest : public ::testing::Test {
 protected:
  void SetUp() override {
    graph_ = RandomGraph(30, 0.15, 4);
    theta0_ = GaussianInitialState(30, 50.0, 100.0, 2);
    params_ = {DefaultStepSize(graph_),
               NoiseSchedule::Uniform(30, {0.9, 3.0, 0.3}), 1.0};
  }
  WeightedGraph graph_ = RandomGraph(2, 0.5, 0);
  Vector theta0_;
  AlgorithmParams params_;
};

TEST_F(MonteCarloTest, SingleRunMatchesDirectRun) {
  MonteCarloOptions opt;
  opt.runs = 1;
  opt.horizon = 80;
  opt.batch_key = 123;
  const MonteCarloResult mc = MonteCarlo(graph_, theta0_, params_, opt);
  RunOptions ro;
  ro.store_history = false;
  const TrajectoryRecord t =
      dpcons::Run(theta0_, params_, graph_,
          GenerateNoiseRecord(params_.schedule, 80, RunSeed(123, 0)), ro);
  EXPECT_EQ(mc.stats.runs, 1u);
  EXPECT_EQ(mc.stats.sample_mean, t.realized_limit);
  EXPECT_EQ(mc.stats.sample_variance, 0.0);
  EXPECT_EQ(mc.settling[0], t.settling_round);
  EXPECT_EQ(mc.stats.conservation_checked, 1u);
  EXPECT_EQ(mc.stats.conservation_violations, 0u);
}

TEST_F(MonteCarloTest, ThreadCountDoesNotChangeResults) {
  MonteCarloOptions opt;
  opt.runs = 64;
  opt.horizon = 50;
  opt.batch_key = 9;
  opt.threads = 1;
  const MonteCarloResult a = MonteCarlo(graph_, theta0_, params_, opt);
  opt.threads = 4;
  const MonteCarloResult b = MonteCarlo(graph_, theta0_, params_, opt);
  EXPECT_EQ(a.limits, b.limits);
  EXPECT_EQ(a.settling, b.settling);
  EXPECT_EQ(a.stats.sample_mean, b.stats.sample_mean);
  EXPECT_EQ(a.stats.sample_variance, b.stats.sample_variance);
  EXPECT_EQ(a.stats.mean_settling, b.stats.mean_settling);
}

TEST_F(MonteCarloTest, LimitOnlyPathMatchesSimulation) {
  MonteCarloOptions opt;
  opt.runs = 50;
  opt.horizon = 70;
  opt.batch_key = 31;
  const MonteCarloResult full = MonteCarlo(graph_, theta0_, params_, opt);
  opt.track_settling = false;
  opt.conservation_stride = 10;
  const MonteCarloResult lean = MonteCarlo(graph_, theta0_, params_, opt);
  EXPECT_EQ(full.limits, lean.limits);
  EXPECT_EQ(lean.stats.conservation_checked, 5u);
  EXPECT_EQ(full.stats.conservation_checked, 50u);
  EXPECT_EQ(lean.stats.conservation_violations, 0u);
  EXPECT_FALSE(lean.settling[3].has_value());
}

TEST_F(MonteCarloTest, UnbiasedWithinCltBand) {
  MonteCarloOptions opt;
  opt.runs = 4000;
  opt.horizon = 60;
  opt.batch_key = 77;
  opt.track_settling = false;
  const MonteCarloResult mc = MonteCarlo(graph_, theta0_, params_, opt);
  const double var = LimitVariance(params_.schedule);
  EXPECT_NEAR(mc.stats.sample_mean, Mean(theta0_),
              4.0 * std::sqrt(var / 4000.0));
  // Loose variance check; the tight one lives in the acceptance suite.
  EXPECT_NEAR(mc.stats.sample_variance / var, 1.0, 0.15);
}

TEST_F(MonteCarloTest, CensoredSettlingStatistics) {
  MonteCarloOptions opt;
  opt.runs = 5;
  opt.horizon = 3;  // too short to settle
  opt.settle_tolerance = 1e-6;
  const MonteCarloResult mc = MonteCarlo(graph_, theta0_, params_, opt);
  EXPECT_EQ(mc.stats.settled_runs, 0u);
  EXPECT_EQ(mc.stats.mean_settling, 4.0);
  EXPECT_EQ(mc.stats.max_settling, 4u);
}

TEST(ConfigTest, ParsesKeysCommentsAndLists) {
  const ExperimentConfig c = ParseConfig(
      "# comment\n"
      "kind = sweep-s\n"
      "n = 20   # trailing comment\n"
      "epsilon = 0.1, 0.2\n"
      "step_size = 0.05\n"
      "c = auto\n"
      "runs = 10\n"
      "master_seed = 18446744073709551615\n"
      "paper_scale = true\n");
  EXPECT_EQ(c.kind, ExperimentKind::kSweepS);
  EXPECT_EQ(c.n, 20u);
  EXPECT_EQ(c.epsilon, (Vector{0.1, 0.2}));
  EXPECT_EQ(c.step_size, 0.05);
  EXPECT_FALSE(c.c.has_value());
  EXPECT_EQ(EffectiveRuns(c), 10u);
  EXPECT_EQ(c.master_seed, 18446744073709551615ULL);
  EXPECT_TRUE(c.paper_scale);
}

TEST(ConfigTest, DefaultsPerKind) {
  ExperimentConfig c;
  EXPECT_EQ(EffectiveRuns(c), 1000u);
  EXPECT_EQ(EffectiveHorizon(c), 500u);
  c.kind = ExperimentKind::kRate;
  EXPECT_EQ(EffectiveHorizon(c), 100u);
  EXPECT_EQ(EffectiveInitialConditions(c), 20u);
  c.paper_scale = true;
  EXPECT_EQ(EffectiveRuns(c), 100u);
  EXPECT_EQ(EffectiveInitialConditions(c), 50u);
  c.kind = ExperimentKind::kHistogram;
  EXPECT_EQ(EffectiveRuns(c), 1000000u);
}

TEST(ConfigTest, RejectsBadInput) {
  for (const char* text :
       {"bogus = 1\n", "n = -3\n", "n 5\n", "epsilon = 0.1, x\n",
        "kind = histogram\n", "paper_scale = maybe\n"}) {
    try {
      ParseConfig(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig) << text;
    }
  }
  try {
    LoadConfig("/nonexistent/dpcons.cfg");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
  }
  for (const char* text : {"runs = 0\n", "horizon = 0\n", "edge_p = 1.5\n",
                           "s = 1, 1, 1\n", "accuracy_p = 1\n"}) {
    EXPECT_THROW(ValidateConfig(ParseConfig(text)), Error) << text;
  }
}

TEST(ConfigTest, JsonHasResolvedValues) {
  ExperimentConfig c = Small(ExperimentKind::kRate);
  const auto j = ConfigToJson(c);
  EXPECT_EQ(j["kind"], "rate");
  EXPECT_EQ(j["runs"], 40);
  EXPECT_EQ(j["initial_conditions"], 3);
  EXPECT_EQ(j["step_size"], "auto");
  EXPECT_FALSE(j.contains("threads"));
}

TEST(ScenarioTest, ResolvesFromFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "dpcons_scn";
  std::filesystem::create_directories(dir);
  WriteTextFile(dir / "g.csv", "0,1,0\n1,0,2\n0,2,0\n");
  WriteTextFile(dir / "x.csv", "1\n2\n3\n");
  ExperimentConfig c;
  c.graph_file = (dir / "g.csv").string();
  c.state_file = (dir / "x.csv").string();
  const Scenario s = ResolveScenario(c);
  EXPECT_EQ(s.graph.size(), 3u);
  EXPECT_EQ(s.theta0, (Vector{1, 2, 3}));
  EXPECT_EQ(s.step_size, 1.0 / 6.0);

  WriteTextFile(dir / "x.csv", "1,2\n");
  try {
    ResolveScenario(c);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  std::filesystem::remove_all(dir);
}

TEST(ScenarioTest, ScheduleFromScalesOrEpsilon) {
  ExperimentConfig c;
  c.s = {0.9};
  c.q = {0.2};
  NoiseSchedule s = ResolveSchedule(c, 4);
  EXPECT_NEAR(s.agent(3).c, 20.0, 1e-12);
  c.c = Vector{1.0, 2.0, 3.0, 4.0};
  s = ResolveSchedule(c, 4);
  EXPECT_EQ(s.agent(2).c, 3.0);
  c.c = Vector{1.0, 2.0};
  EXPECT_THROW(ResolveSchedule(c, 4), Error);
}

TEST(RateTest, NoiselessAlignedStartDecaysAtLambdaBar) {
  // Path on three nodes; eigenvalues of L are 0, 1, 3 and with h = 0.25
  // the slowest disagreement mode decays by 0.75 per round.
  const WeightedGraph g = WeightedGraph::FromAdjacency(
      Matrix::FromRows({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}));
  SpectralSummary spectrum = ComputeSpectralSummary(g, 0.25);
  ASSERT_NEAR(spectrum.lambda_bar, 0.75, 1e-12);
  Vector theta0 = spectrum.slowest_mode;
  const Scenario scenario{g, theta0, 0.25, spectrum};

  ExperimentConfig c = Small(ExperimentKind::kRate);
  c.c = Vector{1e-200};
  c.initial_conditions = 1;
  c.runs = 2;
  c.horizon = 100;
  const RateResult r = EmpiricalRate(scenario, c, 1);
  ASSERT_EQ(r.sup_curve.size(), 100u);
  for (std::size_t k = 0; k < 100; ++k) {
    EXPECT_NEAR(r.curves[0][k], 0.75, 1e-6) << "k = " << k + 1;
  }
  EXPECT_NEAR(r.rate.mu, 0.75, 1e-12);
}

TEST(RateTest, NoiselessCurvesNeverExceedOne) {
  ExperimentConfig c = Small(ExperimentKind::kRate);
  c.c = Vector{1e-200};
  const Scenario scenario = ResolveScenario(c);
  const RateResult r = EmpiricalRate(scenario, c, 1);
  for (const Vector& curve : r.curves) {
    for (double v : curve) EXPECT_LE(v, 1.0);
  }
}

TEST(RateTest, NoisyCurvesSettleBelowOne) {
  // With noise the ratio can exceed 1 during the first rounds, when the
  // injected noise dominates the initial disagreement; the curves fall
  // below 1 once the transient is over.
  ExperimentConfig c = Small(ExperimentKind::kRate);
  c.n = 50;
  c.edge_p = 0.1;
  c.s = {0.9};
  c.q = {0.2};
  c.runs = 30;
  c.horizon = 100;
  const Scenario scenario = ResolveScenario(c);
  const RateResult r = EmpiricalRate(scenario, c, 1);
  double early = 0.0;
  for (const Vector& curve : r.curves) {
    early = std::max(early, curve[0]);
    for (std::size_t k = 20; k < curve.size(); ++k) EXPECT_LT(curve[k], 1.0);
  }
  EXPECT_GT(early, 1.0);
}

TEST(ExperimentTest, EveryKindWritesItsTables) {
  const std::map<ExperimentKind, std::vector<std::string>> expected = {
      {ExperimentKind::kSimulate,
       {"runs.csv", "summary.csv", "accuracy.csv", "trajectory_run0.csv",
        "noise_run0.csv", "noise_run0.json", "report.json"}},
      {ExperimentKind::kSweepS, {"sweep_s.csv"}},
      {ExperimentKind::kTradeoff,
       {"tradeoff.csv", "tradeoff_runs.csv", "tradeoff_curve.csv"}},
      {ExperimentKind::kHistogram, {"histogram.csv", "hist_summary.csv"}},
      {ExperimentKind::kRate, {"rate_curves.csv", "rate_summary.csv"}},
  };
  for (const auto& [kind, files] : expected) {
    const ExperimentOutput out = RunExperiment(Small(kind), 1);
    for (const auto& name : files) {
      EXPECT_TRUE(out.files.contains(name))
          << ExperimentKindName(kind) << " " << name;
    }
    for (const char* common :
         {"metadata.json", "graph.csv", "initial_state.csv"}) {
      EXPECT_TRUE(out.files.contains(common));
    }
    const auto meta = nlohmann::json::parse(out.files.at("metadata.json"));
    EXPECT_EQ(meta["prng"], std::string(kPrngAlgorithm));
    EXPECT_EQ(meta["code_version"], std::string(CodeVersion()));
    EXPECT_EQ(meta["config"]["kind"], std::string(ExperimentKindName(kind)));
    EXPECT_TRUE(meta["seeds"].contains("master_seed"));
  }
}

TEST(ExperimentTest, OutputsIndependentOfThreadCount) {
  for (auto kind : {ExperimentKind::kSimulate, ExperimentKind::kSweepS,
                    ExperimentKind::kTradeoff, ExperimentKind::kHistogram,
                    ExperimentKind::kRate}) {
    const ExperimentConfig c = Small(kind);
    const ExperimentOutput a = RunExperiment(c, 1);
    const ExperimentOutput b = RunExperiment(c, 3);
    EXPECT_EQ(a.files, b.files) << ExperimentKindName(kind);
    EXPECT_EQ(a.summary, b.summary);
  }
}

TEST(ExperimentTest, SeedChangesNoise) {
  ExperimentConfig c = Small(ExperimentKind::kSimulate);
  const ExperimentOutput a = RunExperiment(c, 1);
  c.master_seed = 2;
  const ExperimentOutput b = RunExperiment(c, 1);
  EXPECT_NE(a.files.at("runs.csv"), b.files.at("runs.csv"));
  EXPECT_EQ(a.files.at("graph.csv"), b.files.at("graph.csv"));
}

TEST(ExperimentTest, ReportWithoutSimulation) {
  ExperimentConfig c;
  const GuaranteeReport r = ReportFor(c);
  EXPECT_EQ(r.limit_variance, 4.0);
  EXPECT_EQ(r.optimal_cost, 4.0);
  EXPECT_EQ(r.rate.mu, r.rate.lambda_bar);
}

}  // namespace
}  // namespace dpcons
