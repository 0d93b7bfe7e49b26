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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "dpcons/error.h"
#include "dpcons/io.h"
#include "dpcons/rng.h"

#ifndef DPCONS_VERSION
#define DPCONS_VERSION "0.0.0"
#endif

namespace dpcons {

namespace {

Vector Expand(const Vector& values, std::size_t n, const char* key) {
  if (values.size() == n) return values;
  if (values.size() == 1) return Vector(n, values.front());
  throw Error(ErrorCode::kInvalidConfig,
              std::string("key '") + key + "' needs 1 or n = " +
                  std::to_string(n) + " values");
}

struct RunOutcome {
  double limit = 0.0;
  std::optional<std::size_t> settling;
  bool checked = false;
  double conservation_error = 0.0;
  bool violation = false;
};

RunStatistics Reduce(const std::vector<RunOutcome>& outcomes,
                     double initial_average, std::size_t horizon,
                     bool track_settling) {
  RunStatistics st;
  st.runs = outcomes.size();
  st.initial_average = initial_average;
  Vector limits;
  limits.reserve(outcomes.size());
  CompensatedSum settle_sum;
  st.min_settling = horizon + 1;
  for (const RunOutcome& o : outcomes) {
    limits.push_back(o.limit);
    if (o.limit - initial_average == 0.0) ++st.exact_hits;
    if (o.checked) {
      ++st.conservation_checked;
      st.conservation_max_error =
          std::max(st.conservation_max_error, o.conservation_error);
      if (o.violation) ++st.conservation_violations;
    }
    if (track_settling) {
      const std::size_t k = o.settling.value_or(horizon + 1);
      if (o.settling) ++st.settled_runs;
      settle_sum.Add(static_cast<double>(k));
      st.min_settling = std::min(st.min_settling, k);
      st.max_settling = std::max(st.max_settling, k);
    }
  }
  if (!track_settling) st.min_settling = 0;
  const SampleMoments m = ComputeMoments(limits);
  st.sample_mean = m.mean;
  st.sample_variance = m.variance;
  if (track_settling) {
    st.mean_settling = settle_sum.value() / static_cast<double>(st.runs);
  }
  return st;
}

void AddStatsColumns(CsvWriter& csv, const RunStatistics& st) {
  csv.Cell(static_cast<long long>(st.runs))
      .Cell(st.sample_mean)
      .Cell(st.sample_variance)
      .Cell(std::sqrt(st.sample_variance));
}

nlohmann::ordered_json StatsJson(const RunStatistics& st) {
  nlohmann::ordered_json j;
  j["runs"] = st.runs;
  j["initial_average"] = st.initial_average;
  j["sample_mean"] = st.sample_mean;
  j["sample_variance"] = st.sample_variance;
  j["settled_runs"] = st.settled_runs;
  j["mean_settling"] = st.mean_settling;
  j["min_settling"] = st.min_settling;
  j["max_settling"] = st.max_settling;
  j["conservation_checked"] = st.conservation_checked;
  j["conservation_violations"] = st.conservation_violations;
  j["conservation_max_error"] = st.conservation_max_error;
  j["exact_hits"] = st.exact_hits;
  return j;
}

AlgorithmParams ParamsFor(const Scenario& scenario,
                          const ExperimentConfig& config,
                          NoiseSchedule schedule) {
  AlgorithmParams params{scenario.step_size, std::move(schedule),
                         config.delta};
  ValidateParams(params, scenario.graph);
  return params;
}

MonteCarloOptions OptionsFor(const ExperimentConfig& config,
                             std::uint64_t batch_key, unsigned threads,
                             bool track_settling) {
  MonteCarloOptions opt;
  opt.runs = EffectiveRuns(config);
  opt.horizon = EffectiveHorizon(config);
  opt.batch_key = batch_key;
  opt.threads = threads;
  opt.settle_tolerance = config.settle_tolerance;
  opt.track_settling = track_settling;
  opt.conservation_stride = config.conservation_stride;
  return opt;
}

}  // namespace

std::string_view CodeVersion() { return DPCONS_VERSION; }

void ParallelFor(std::size_t count, unsigned threads,
                 const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::size_t failed_index = count;
  std::exception_ptr failure;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
        failed.store(true);
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) {
    std::string what = "unknown error";
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    throw Error(ErrorCode::kRunFailure,
                "run " + std::to_string(failed_index) + " failed: " + what);
  }
}

std::uint64_t NoiseRootKey(std::uint64_t master_seed) {
  return DomainKey(master_seed, StreamDomain::kNoise);
}

std::uint64_t RunSeed(std::uint64_t batch_key, std::size_t run) {
  return DeriveKey(batch_key, run);
}

Vector GaussianInitialState(std::size_t n, double mean, double variance,
                            std::uint64_t seed, std::size_t index) {
  const CounterStream stream(
      DeriveKey(DomainKey(seed, StreamDomain::kInitialState), index));
  const double sd = std::sqrt(variance);
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = mean + sd * stream.StandardNormal(i);
  }
  return out;
}

Scenario ResolveScenario(const ExperimentConfig& config) {
  ValidateConfig(config);
  WeightedGraph graph =
      config.graph_file.empty()
          ? RandomGraph(config.n, config.edge_p, config.graph_seed)
          : ReadGraphCsv(config.graph_file);
  const std::size_t n = graph.size();

  Vector theta0;
  if (config.state_file.empty()) {
    theta0 = GaussianInitialState(n, config.state_mean, config.state_variance,
                                  config.state_seed);
  } else {
    for (const auto& row : ParseNumericCsv(ReadTextFile(config.state_file))) {
      theta0.insert(theta0.end(), row.begin(), row.end());
    }
    if (theta0.size() != n) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "state file has " + std::to_string(theta0.size()) +
                      " values for " + std::to_string(n) + " agents");
    }
  }
  const double h = config.step_size.value_or(DefaultStepSize(graph));
  SpectralSummary spectrum = ComputeSpectralSummary(graph, h);
  return Scenario{std::move(graph), std::move(theta0), h, std::move(spectrum)};
}

NoiseSchedule ResolveSchedule(const ExperimentConfig& config, std::size_t n) {
  const Vector s = Expand(config.s, n, "s");
  const Vector q = Expand(config.q, n, "q");
  if (config.c) {
    const Vector c = Expand(*config.c, n, "c");
    std::vector<AgentNoise> agents(n);
    for (std::size_t i = 0; i < n; ++i) agents[i] = {s[i], c[i], q[i]};
    return NoiseSchedule::Create(std::move(agents));
  }
  const PrivacySpec privacy{config.delta, Expand(config.epsilon, n, "epsilon")};
  return CalibratedSchedule(privacy, s, q);
}

MonteCarloResult MonteCarlo(const WeightedGraph& graph,
                            std::span<const double> theta0,
                            const AlgorithmParams& params,
                            const MonteCarloOptions& options) {
  ValidateParams(params, graph);
  if (theta0.size() != graph.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "initial state size does not match the graph");
  }
  if (options.runs < 1 || options.horizon < 1) {
    throw Error(ErrorCode::kInvalidParameters,
                "runs and horizon must be at least 1");
  }
  const std::size_t stride = std::max<std::size_t>(options.conservation_stride, 1);
  const double initial_average = Mean(theta0);
  const NoiseSchedule& schedule = params.schedule;
  std::vector<RunOutcome> outcomes(options.runs);

  ParallelFor(options.runs, options.threads, [&](std::size_t r) {
    const std::uint64_t seed = RunSeed(options.batch_key, r);
    RunOutcome& o = outcomes[r];
    if (!options.track_settling && r % stride != 0) {
      o.limit = LimitFromNoiseSums(
          initial_average, schedule,
          NoiseRowSums(schedule, options.horizon, seed));
      return;
    }
    RunOptions run_options;
    run_options.store_history = false;
    run_options.settle_tolerance = options.settle_tolerance;
    const TrajectoryRecord traj =
        Run(theta0, params, graph,
            GenerateNoiseRecord(schedule, options.horizon, seed), run_options);
    o.limit = traj.realized_limit;
    if (options.track_settling) o.settling = traj.settling_round;

    const Vector expected =
        AverageCurve(theta0, schedule, traj.record, traj.steps());
    double scale = 1.0;
    for (std::size_t k = 0; k < expected.size(); ++k) {
      o.conservation_error = std::max(
          o.conservation_error, std::abs(traj.average[k] - expected[k]));
      scale = std::max(scale,
                       std::abs(traj.realized_limit) + traj.max_deviation[k]);
    }
    o.checked = true;
    o.violation = o.conservation_error > kConservationTolerance * scale;
  });

  MonteCarloResult result;
  result.stats = Reduce(outcomes, initial_average, options.horizon,
                        options.track_settling);
  result.limits.reserve(outcomes.size());
  result.settling.reserve(outcomes.size());
  for (const RunOutcome& o : outcomes) {
    result.limits.push_back(o.limit);
    result.settling.push_back(o.settling);
  }
  return result;
}

Vector LogGrid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) {
    throw Error(ErrorCode::kInvalidGrid,
                "log grid needs 0 < lo < hi and at least 2 points");
  }
  Vector grid(points);
  const double step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo * std::exp(step * static_cast<double>(i));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

Vector SweepGrid(const ExperimentConfig& config) {
  Vector grid = config.s_grid;
  if (grid.empty()) {
    grid = LogGrid(config.s_min, config.s_max, config.s_points);
    if (config.s_min <= 1.0 && 1.0 <= config.s_max) {
      auto nearest = std::min_element(
          grid.begin(), grid.end(), [](double a, double b) {
            return std::abs(a - 1.0) < std::abs(b - 1.0);
          });
      *nearest = 1.0;
    }
  }
  for (double s : grid) {
    if (!(s > 0.0 && s < 2.0)) {
      throw Error(ErrorCode::kInvalidGrid,
                  "s grid value " + FormatDouble(s) + " outside (0, 2)");
    }
  }
  return grid;
}

Vector EpsilonGrid(const ExperimentConfig& config) {
  Vector grid = config.epsilon_grid;
  if (grid.empty()) {
    grid = LogGrid(config.epsilon_min, config.epsilon_max,
                   config.epsilon_points);
  }
  for (double e : grid) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw Error(ErrorCode::kInvalidGrid, "epsilon grid values must be > 0");
    }
  }
  return grid;
}

std::vector<SweepRow> SweepS(const Scenario& scenario,
                             const ExperimentConfig& config,
                             unsigned threads) {
  const Vector grid = SweepGrid(config);
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidGrid, "alpha must lie in (0, 1)");
  }
  const std::size_t n = scenario.graph.size();
  const Vector eps = Expand(config.epsilon, n, "epsilon");
  const std::uint64_t root = NoiseRootKey(config.master_seed);
  std::vector<SweepRow> rows;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    SweepRow row;
    row.s = grid[g];
    row.q = DecayFromAlpha(config.alpha, row.s);
    std::vector<AgentNoise> agents(n);
    for (std::size_t i = 0; i < n; ++i) {
      agents[i] = {row.s, ScaleForEpsilon(eps[i], config.delta, row.s, row.q),
                   row.q};
    }
    row.c = agents.front().c;
    const AlgorithmParams params =
        ParamsFor(scenario, config, NoiseSchedule::Create(std::move(agents)));
    row.predicted_variance = LimitVariance(params.schedule);
    row.stats = MonteCarlo(scenario.graph, scenario.theta0, params,
                           OptionsFor(config, DeriveKey(root, g), threads,
                                      /*track_settling=*/true))
                    .stats;
    rows.push_back(row);
  }
  return rows;
}

std::vector<TradeoffRow> SweepTradeoff(const Scenario& scenario,
                                       const ExperimentConfig& config,
                                       unsigned threads) {
  const Vector grid = EpsilonGrid(config);
  const std::size_t n = scenario.graph.size();
  const std::uint64_t root = NoiseRootKey(config.master_seed);
  std::vector<TradeoffRow> rows;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    TradeoffRow row;
    row.epsilon = grid[g];
    const PrivacySpec privacy = PrivacySpec::Uniform(n, row.epsilon,
                                                     config.delta);
    const AlgorithmParams params =
        ParamsFor(scenario, config, OptimalSchedule(privacy));
    row.predicted_variance = LimitVariance(params.schedule);
    row.optimal_cost = OptimalCost(privacy);
    MonteCarloResult mc =
        MonteCarlo(scenario.graph, scenario.theta0, params,
                   OptionsFor(config, DeriveKey(root, g), threads,
                              /*track_settling=*/false));
    row.stats = mc.stats;
    for (double limit : mc.limits) {
      row.abs_errors.push_back(std::abs(limit - mc.stats.initial_average));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

HistogramResult Histogram(const Scenario& scenario,
                          const ExperimentConfig& config, unsigned threads) {
  const std::size_t n = scenario.graph.size();
  const PrivacySpec privacy{config.delta, Expand(config.epsilon, n, "epsilon")};
  const AlgorithmParams params =
      ParamsFor(scenario, config, OptimalSchedule(privacy));
  MonteCarloResult mc =
      MonteCarlo(scenario.graph, scenario.theta0, params,
                 OptionsFor(config, NoiseRootKey(config.master_seed), threads,
                            /*track_settling=*/false));
  HistogramResult out;
  out.stats = mc.stats;
  out.moments = ComputeMoments(mc.limits);
  out.optimal_cost = OptimalCost(privacy);
  const auto [lo, hi] = std::minmax_element(mc.limits.begin(), mc.limits.end());
  out.lower = *lo;
  const double span = *hi - *lo;
  out.counts.assign(config.bins, 0);
  out.bin_width = span > 0.0 ? span / static_cast<double>(config.bins) : 1.0;
  for (double v : mc.limits) {
    auto b = static_cast<std::size_t>((v - out.lower) / out.bin_width);
    out.counts[std::min(b, config.bins - 1)]++;
  }
  return out;
}

std::size_t LimitHorizon(const NoiseSchedule& schedule, std::size_t min) {
  const double target = 1e-12 * (1.0 + std::sqrt(LimitVariance(schedule)));
  std::size_t k = min;
  constexpr std::size_t kMaxHorizon = 1000000;
  while (TailBound(schedule, k) > target && k < kMaxHorizon) {
    k = std::max<std::size_t>(k + 1, k + k / 4);
  }
  return k;
}

RateResult EmpiricalRate(const Scenario& scenario,
                         const ExperimentConfig& config, unsigned threads) {
  const std::size_t n = scenario.graph.size();
  const AlgorithmParams params =
      ParamsFor(scenario, config, ResolveSchedule(config, n));
  const std::size_t steps = EffectiveHorizon(config);
  const std::size_t realizations = EffectiveRuns(config);
  const std::size_t conditions = EffectiveInitialConditions(config);
  const std::size_t noise_horizon = LimitHorizon(params.schedule, steps);

  std::vector<Vector> initial(conditions);
  for (std::size_t m = 0; m < conditions; ++m) {
    initial[m] = (m == 0) ? scenario.theta0
                          : GaussianInitialState(n, config.state_mean,
                                                 config.state_variance,
                                                 config.state_seed, m);
  }

  const std::uint64_t root = NoiseRootKey(config.master_seed);
  std::vector<Vector> sq(conditions * realizations);
  ParallelFor(sq.size(), threads, [&](std::size_t job) {
    const std::size_t m = job / realizations;
    const std::size_t r = job % realizations;
    RunOptions run_options;
    run_options.steps = steps;
    run_options.store_history = false;
    run_options.settle_tolerance = config.settle_tolerance;
    NoiseRecord record = GenerateNoiseRecord(
        params.schedule, noise_horizon, RunSeed(DeriveKey(root, m), r));
    sq[job] = Run(initial[m], params, scenario.graph, std::move(record),
                  run_options)
                  .squared_deviation;
  });

  RateResult out;
  out.rate = CombineRate(params.schedule, scenario.spectrum.lambda_bar);
  out.sup_curve.assign(steps, 0.0);
  for (std::size_t m = 0; m < conditions; ++m) {
    Vector mean_sq(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
      CompensatedSum acc;
      for (std::size_t r = 0; r < realizations; ++r) {
        acc.Add(sq[m * realizations + r][k]);
      }
      mean_sq[k] = acc.value() / static_cast<double>(realizations);
    }
    Vector curve(steps);
    for (std::size_t k = 1; k <= steps; ++k) {
      curve[k - 1] =
          std::pow(mean_sq[k] / mean_sq[0], 1.0 / (2.0 * static_cast<double>(k)));
      out.sup_curve[k - 1] = std::max(out.sup_curve[k - 1], curve[k - 1]);
    }
    out.curves.push_back(std::move(curve));
  }
  return out;
}

GuaranteeReport ReportFor(const ExperimentConfig& config) {
  const Scenario scenario = ResolveScenario(config);
  const NoiseSchedule schedule =
      ResolveSchedule(config, scenario.graph.size());
  return MakeGuaranteeReport(schedule, config.delta, scenario.graph,
                             scenario.step_size, config.accuracy_p);
}

nlohmann::ordered_json ExperimentMetadata(const ExperimentConfig& config,
                                          const Scenario& scenario) {
  nlohmann::ordered_json j;
  j["tool"] = "dpcons";
  j["code_version"] = CodeVersion();
  j["prng"] = kPrngAlgorithm;
  j["seeds"] = {{"master_seed", config.master_seed},
                {"graph_seed", config.graph_seed},
                {"state_seed", config.state_seed}};
  j["config"] = ConfigToJson(config);
  j["scenario"] = {{"n", scenario.graph.size()},
                   {"max_degree", scenario.spectrum.max_degree},
                   {"step_size", scenario.step_size},
                   {"lambda_bar", scenario.spectrum.lambda_bar},
                   {"initial_average", Mean(scenario.theta0)}};
  return j;
}

namespace {

void RenderSimulate(const Scenario& scenario, const ExperimentConfig& config,
                    unsigned threads, ExperimentOutput& out) {
  const AlgorithmParams params = ParamsFor(
      scenario, config, ResolveSchedule(config, scenario.graph.size()));
  const std::uint64_t root = NoiseRootKey(config.master_seed);
  const MonteCarloResult mc =
      MonteCarlo(scenario.graph, scenario.theta0, params,
                 OptionsFor(config, root, threads, /*track_settling=*/true));
  const RunStatistics& st = mc.stats;

  CsvWriter runs({"run", "realized_limit", "error", "settling_round"});
  for (std::size_t r = 0; r < mc.limits.size(); ++r) {
    runs.Cell(static_cast<long long>(r))
        .Cell(mc.limits[r])
        .Cell(mc.limits[r] - st.initial_average);
    if (mc.settling[r]) {
      runs.Cell(static_cast<long long>(*mc.settling[r]));
    } else {
      runs.Cell("");
    }
    runs.EndRow();
  }
  out.files["runs.csv"] = runs.text();

  const double variance = LimitVariance(params.schedule);
  CsvWriter summary({"runs", "initial_average", "sample_mean",
                     "sample_variance", "predicted_variance",
                     "mean_settling", "min_settling", "max_settling",
                     "settled_runs"});
  summary.Cell(static_cast<long long>(st.runs))
      .Cell(st.initial_average)
      .Cell(st.sample_mean)
      .Cell(st.sample_variance)
      .Cell(variance)
      .Cell(st.mean_settling)
      .Cell(static_cast<long long>(st.min_settling))
      .Cell(static_cast<long long>(st.max_settling))
      .Cell(static_cast<long long>(st.settled_runs))
      .EndRow();
  out.files["summary.csv"] = summary.text();

  CsvWriter accuracy({"p", "radius", "coverage", "required"});
  for (double p : config.accuracy_p) {
    const double r = AccuracyRadius(params.schedule, p);
    std::size_t inside = 0;
    for (double v : mc.limits) {
      if (std::abs(v - st.initial_average) <= r) ++inside;
    }
    accuracy.Cell(p)
        .Cell(r)
        .Cell(static_cast<double>(inside) / static_cast<double>(st.runs))
        .Cell(1.0 - p)
        .EndRow();
  }
  out.files["accuracy.csv"] = accuracy.text();

  // Full audit trail for run 0.
  const std::uint64_t seed0 = RunSeed(root, 0);
  RunOptions run_options;
  run_options.settle_tolerance = config.settle_tolerance;
  const TrajectoryRecord traj =
      Run(scenario.theta0, params, scenario.graph,
          GenerateNoiseRecord(params.schedule, EffectiveHorizon(config), seed0),
          run_options);
  out.files["trajectory_run0.csv"] = FormatTrajectoryCsv(traj);
  out.files["trajectory_run0.json"] = TrajectoryMetadataJson(traj, params);
  out.files["noise_run0.csv"] = FormatNoiseCsv(traj.record);
  out.files["noise_run0.json"] = NoiseMetadataJson(traj.record);

  out.summary["statistics"] = StatsJson(st);
  out.summary["predicted_variance"] = variance;
  out.files["report.json"] = GuaranteeReportJson(
      MakeGuaranteeReport(params.schedule, config.delta, scenario.graph,
                          scenario.step_size, config.accuracy_p));
}

void RenderSweep(const Scenario& scenario, const ExperimentConfig& config,
                 unsigned threads, ExperimentOutput& out) {
  CsvWriter csv({"s", "q", "c", "runs", "sample_mean", "sample_variance",
                 "sample_std", "predicted_variance", "predicted_std",
                 "mean_settling", "min_settling", "max_settling",
                 "settled_runs"});
  std::size_t best_std = 0, best_settle = 0;
  const auto rows = SweepS(scenario, config, threads);
  for (std::size_t g = 0; g < rows.size(); ++g) {
    const SweepRow& row = rows[g];
    csv.Cell(row.s).Cell(row.q).Cell(row.c);
    AddStatsColumns(csv, row.stats);
    csv.Cell(row.predicted_variance)
        .Cell(std::sqrt(row.predicted_variance))
        .Cell(row.stats.mean_settling)
        .Cell(static_cast<long long>(row.stats.min_settling))
        .Cell(static_cast<long long>(row.stats.max_settling))
        .Cell(static_cast<long long>(row.stats.settled_runs))
        .EndRow();
    if (row.stats.sample_variance < rows[best_std].stats.sample_variance) {
      best_std = g;
    }
    if (row.stats.mean_settling < rows[best_settle].stats.mean_settling) {
      best_settle = g;
    }
  }
  out.files["sweep_s.csv"] = csv.text();
  out.summary["argmin_std_s"] = rows[best_std].s;
  out.summary["argmin_settling_s"] = rows[best_settle].s;
}

void RenderTradeoff(const Scenario& scenario, const ExperimentConfig& config,
                    unsigned threads, ExperimentOutput& out) {
  const auto rows = SweepTradeoff(scenario, config, threads);
  CsvWriter table({"epsilon", "runs", "sample_mean", "sample_variance",
                   "sample_std", "predicted_variance", "J_star"});
  CsvWriter samples({"epsilon", "run", "abs_error"});
  Vector log_eps, log_var;
  for (const TradeoffRow& row : rows) {
    table.Cell(row.epsilon);
    AddStatsColumns(table, row.stats);
    table.Cell(row.predicted_variance).Cell(row.optimal_cost).EndRow();
    for (std::size_t r = 0; r < row.abs_errors.size(); ++r) {
      samples.Cell(row.epsilon)
          .Cell(static_cast<long long>(r))
          .Cell(row.abs_errors[r])
          .EndRow();
    }
    log_eps.push_back(std::log(row.epsilon));
    log_var.push_back(std::log(row.stats.sample_variance));
  }
  out.files["tradeoff.csv"] = table.text();
  out.files["tradeoff_runs.csv"] = samples.text();
  out.files["tradeoff_curve.csv"] = TradeoffCurveCsv(
      scenario.graph.size(), config.delta, 1.0, 0.0, EpsilonGrid(config));
  if (rows.size() >= 2) {
    out.summary["loglog_slope"] = FitLine(log_eps, log_var).slope;
  }
}

void RenderHistogram(const Scenario& scenario, const ExperimentConfig& config,
                     unsigned threads, ExperimentOutput& out) {
  const HistogramResult h = Histogram(scenario, config, threads);
  CsvWriter bins({"bin_lower", "bin_upper", "count"});
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    bins.Cell(h.lower + h.bin_width * static_cast<double>(b))
        .Cell(h.lower + h.bin_width * static_cast<double>(b + 1))
        .Cell(static_cast<long long>(h.counts[b]))
        .EndRow();
  }
  out.files["histogram.csv"] = bins.text();
  CsvWriter summary({"runs", "true_average", "sample_mean", "distance",
                     "sample_variance", "J_star", "skewness",
                     "excess_kurtosis"});
  summary.Cell(static_cast<long long>(h.stats.runs))
      .Cell(h.stats.initial_average)
      .Cell(h.moments.mean)
      .Cell(std::abs(h.moments.mean - h.stats.initial_average))
      .Cell(h.moments.variance)
      .Cell(h.optimal_cost)
      .Cell(h.moments.skewness)
      .Cell(h.moments.excess_kurtosis)
      .EndRow();
  out.files["hist_summary.csv"] = summary.text();
  out.summary["statistics"] = StatsJson(h.stats);
}

void RenderRate(const Scenario& scenario, const ExperimentConfig& config,
                unsigned threads, ExperimentOutput& out) {
  const RateResult rate = EmpiricalRate(scenario, config, threads);
  CsvWriter curves({"initial_condition", "k", "value"});
  for (std::size_t m = 0; m < rate.curves.size(); ++m) {
    for (std::size_t k = 1; k <= rate.curves[m].size(); ++k) {
      curves.Cell(static_cast<long long>(m))
          .Cell(static_cast<long long>(k))
          .Cell(rate.curves[m][k - 1])
          .EndRow();
    }
  }
  out.files["rate_curves.csv"] = curves.text();
  CsvWriter summary({"k", "sup_value", "mu", "q_bar", "lambda_bar"});
  for (std::size_t k = 1; k <= rate.sup_curve.size(); ++k) {
    summary.Cell(static_cast<long long>(k))
        .Cell(rate.sup_curve[k - 1])
        .Cell(rate.rate.mu)
        .Cell(rate.rate.q_bar)
        .Cell(rate.rate.lambda_bar)
        .EndRow();
  }
  out.files["rate_summary.csv"] = summary.text();
  out.summary["mu"] = rate.rate.mu;
  out.summary["q_bar"] = rate.rate.q_bar;
  out.summary["lambda_bar"] = rate.rate.lambda_bar;
  out.summary["sup_at_horizon"] = rate.sup_curve.back();
}

}  // namespace

ExperimentOutput RunExperiment(const ExperimentConfig& config,
                               unsigned threads) {
  const Scenario scenario = ResolveScenario(config);
  ExperimentOutput out;
  out.summary["kind"] = ExperimentKindName(config.kind);
  switch (config.kind) {
    case ExperimentKind::kSimulate:
      RenderSimulate(scenario, config, threads, out);
      break;
    case ExperimentKind::kSweepS:
      RenderSweep(scenario, config, threads, out);
      break;
    case ExperimentKind::kTradeoff:
      RenderTradeoff(scenario, config, threads, out);
      break;
    case ExperimentKind::kHistogram:
      RenderHistogram(scenario, config, threads, out);
      break;
    case ExperimentKind::kRate:
      RenderRate(scenario, config, threads, out);
      break;
  }
  out.files["graph.csv"] = FormatGraphCsv(scenario.graph);
  CsvWriter state({"agent", "theta0"});
  for (std::size_t i = 0; i < scenario.theta0.size(); ++i) {
    state.Cell(static_cast<long long>(i)).Cell(scenario.theta0[i]).EndRow();
  }
  out.files["initial_state.csv"] = state.text();
  out.files["metadata.json"] =
      ExperimentMetadata(config, scenario).dump(2) + "\n";
  return out;
}

}  // namespace dpcons
