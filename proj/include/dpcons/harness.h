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

// Batch Monte Carlo experiments over the consensus dynamics.
//
// Graph and initial state are fixed once per experiment; only the noise
// changes between runs. Run r of a batch draws its noise from substream
// DeriveKey(batch_key, r), so results are a function of the seeds alone.
// Runs are spread over a worker pool and reduced in run-index order with
// compensated sums, which makes every output independent of the thread
// count.

#ifndef DPCONS_HARNESS_H_
#define DPCONS_HARNESS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dpcons/analysis.h"
#include "dpcons/config.h"
#include "dpcons/dynamics.h"
#include "dpcons/graph.h"
#include "dpcons/stats.h"

namespace dpcons {

// Calls fn(i) for i in [0, count) on `threads` workers (0 = hardware
// concurrency). If any call throws, the failure with the smallest index is
// rethrown as kRunFailure naming that index.
void ParallelFor(std::size_t count, unsigned threads,
                 const std::function<void(std::size_t)>& fn);

// Root of the noise key tree for a master seed.
std::uint64_t NoiseRootKey(std::uint64_t master_seed);
// Per-run record seed within a batch.
std::uint64_t RunSeed(std::uint64_t batch_key, std::size_t run);

// Initial state theta_i = mean + sqrt(variance) * z_i, z_i standard normal
// from the substream (seed, index).
Vector GaussianInitialState(std::size_t n, double mean, double variance,
                            std::uint64_t seed, std::size_t index = 0);

struct Scenario {
  WeightedGraph graph;
  Vector theta0;
  double step_size = 0.0;
  SpectralSummary spectrum;
};

// Loads or generates graph and initial state; computes the step size and
// spectrum. Throws kInvalidConfig-class errors for bad inputs.
Scenario ResolveScenario(const ExperimentConfig& config);

// Schedule from config: explicit `c`, or calibrated from epsilon.
NoiseSchedule ResolveSchedule(const ExperimentConfig& config, std::size_t n);

struct MonteCarloOptions {
  std::size_t runs = 1000;
  std::size_t horizon = 500;
  std::uint64_t batch_key = 0;
  unsigned threads = 1;
  double settle_tolerance = 1e-2;
  // Simulate every run (needed for settling times). When false, limits
  // come from the noise sums alone and only spot-checked runs simulate.
  bool track_settling = true;
  // Every stride-th run (and all simulated runs) checks the average
  // evolution identity against the trajectory.
  std::size_t conservation_stride = 100;
};

// Absolute tolerance of the average-evolution identity, scaled by the
// largest state magnitude seen in the run.
inline constexpr double kConservationTolerance = 1e-10;

struct RunStatistics {
  std::size_t runs = 0;
  double initial_average = 0.0;
  double sample_mean = 0.0;
  double sample_variance = 0.0;

  std::size_t settled_runs = 0;
  // Unsettled runs are counted at horizon + 1.
  double mean_settling = 0.0;
  std::size_t min_settling = 0;
  std::size_t max_settling = 0;

  std::size_t conservation_checked = 0;
  std::size_t conservation_violations = 0;
  double conservation_max_error = 0.0;
  // Runs with |theta_inf - <theta0>| == 0.
  std::size_t exact_hits = 0;
};

struct MonteCarloResult {
  RunStatistics stats;
  Vector limits;  // per run
  std::vector<std::optional<std::size_t>> settling;
};

MonteCarloResult MonteCarlo(const WeightedGraph& graph,
                            std::span<const double> theta0,
                            const AlgorithmParams& params,
                            const MonteCarloOptions& options);

// Default s grid: `points` log-spaced values over [lo, hi], with the point
// closest to 1 replaced by exactly 1 when 1 is inside the range.
Vector LogGrid(double lo, double hi, std::size_t points);
Vector SweepGrid(const ExperimentConfig& config);
Vector EpsilonGrid(const ExperimentConfig& config);

// A finished experiment: CSV tables by file name plus a summary document.
struct ExperimentOutput {
  std::map<std::string, std::string> files;
  nlohmann::ordered_json summary;
};

struct SweepRow {
  double s = 0.0;
  double q = 0.0;
  double c = 0.0;
  RunStatistics stats;
  double predicted_variance = 0.0;
};

struct TradeoffRow {
  double epsilon = 0.0;
  RunStatistics stats;
  Vector abs_errors;
  double predicted_variance = 0.0;
  double optimal_cost = 0.0;
};

struct HistogramResult {
  RunStatistics stats;
  SampleMoments moments;
  double optimal_cost = 0.0;
  double lower = 0.0;
  double bin_width = 0.0;
  std::vector<std::size_t> counts;
};

struct RateResult {
  RateSummary rate;
  // curves[m][k - 1] for initial condition m and round k = 1..K.
  std::vector<Vector> curves;
  Vector sup_curve;
};

std::vector<SweepRow> SweepS(const Scenario& scenario,
                             const ExperimentConfig& config,
                             unsigned threads);
std::vector<TradeoffRow> SweepTradeoff(const Scenario& scenario,
                                       const ExperimentConfig& config,
                                       unsigned threads);
HistogramResult Histogram(const Scenario& scenario,
                          const ExperimentConfig& config, unsigned threads);
RateResult EmpiricalRate(const Scenario& scenario,
                         const ExperimentConfig& config, unsigned threads);

// Noise horizon long enough that the untracked tail of the realized limit
// is negligible (tail bound <= 1e-12 * (1 + predicted std)), and >= min.
std::size_t LimitHorizon(const NoiseSchedule& schedule, std::size_t min);

// Runs the configured experiment and renders its tables.
ExperimentOutput RunExperiment(const ExperimentConfig& config,
                               unsigned threads);

// GuaranteeReport for the configuration, without simulating.
GuaranteeReport ReportFor(const ExperimentConfig& config);

// Metadata sidecar: full config, seeds, PRNG identifier, code version.
nlohmann::ordered_json ExperimentMetadata(const ExperimentConfig& config,
                                          const Scenario& scenario);

std::string_view CodeVersion();

}  // namespace dpcons

#endif  // DPCONS_HARNESS_H_
