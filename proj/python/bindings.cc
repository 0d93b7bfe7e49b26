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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "dpcons/analysis.h"
#include "dpcons/config.h"
#include "dpcons/dynamics.h"
#include "dpcons/error.h"
#include "dpcons/graph.h"
#include "dpcons/harness.h"
#include "dpcons/noise.h"

namespace py = pybind11;

namespace dpcons {
namespace {

using Rows = std::vector<std::vector<double>>;

NoiseSchedule ScheduleFrom(const Vector& s, const Vector& c, const Vector& q) {
  if (s.size() != c.size() || s.size() != q.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "s, c and q must have the same length");
  }
  std::vector<AgentNoise> agents;
  for (std::size_t i = 0; i < s.size(); ++i) agents.push_back({s[i], c[i], q[i]});
  return NoiseSchedule::Create(std::move(agents));
}

py::dict Simulate(const Rows& adjacency, const Vector& theta0, double h,
                  const Vector& s, const Vector& c, const Vector& q,
                  std::size_t horizon, std::uint64_t seed) {
  const WeightedGraph graph =
      WeightedGraph::FromAdjacency(Matrix::FromRows(adjacency));
  const AlgorithmParams params{h, ScheduleFrom(s, c, q), 1.0};
  TrajectoryRecord t;
  {
    py::gil_scoped_release release;
    t = Run(theta0, params, graph,
            GenerateNoiseRecord(params.schedule, horizon, seed));
  }
  py::dict out;
  out["theta"] = t.theta.ToRows();
  out["x"] = t.x.ToRows();
  out["eta"] = t.record.eta.ToRows();
  out["average"] = t.average;
  out["realized_limit"] = t.realized_limit;
  out["settling_round"] = t.settling_round;
  return out;
}

py::dict Experiment(const std::string& config_text, unsigned threads) {
  ExperimentConfig config = ParseConfig(config_text);
  ValidateConfig(config);
  ExperimentOutput result;
  {
    py::gil_scoped_release release;
    result = RunExperiment(config, threads);
  }
  py::dict out;
  out["files"] = result.files;
  out["summary"] = result.summary.dump();
  return out;
}

}  // namespace
}  // namespace dpcons

PYBIND11_MODULE(_core, m) {
  using namespace dpcons;
  m.doc() = "Differentially private average consensus core.";

  static py::exception<Error> error_type(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string text =
          std::string(ErrorCodeName(e.code())) + ": " + e.what();
      PyErr_SetString(error_type.ptr(), text.c_str());
    }
  });

  m.def("random_graph",
        [](std::size_t n, double p, std::uint64_t seed) {
          return RandomGraph(n, p, seed).adjacency().ToRows();
        },
        py::arg("n"), py::arg("p"), py::arg("seed"));
  m.def("default_step_size",
        [](const Rows& adjacency) {
          return DefaultStepSize(
              WeightedGraph::FromAdjacency(Matrix::FromRows(adjacency)));
        },
        py::arg("adjacency"));
  m.def("lambda_bar",
        [](const Rows& adjacency, double h) {
          return ComputeSpectralSummary(
                     WeightedGraph::FromAdjacency(Matrix::FromRows(adjacency)),
                     h)
              .lambda_bar;
        },
        py::arg("adjacency"), py::arg("h"));

  m.def("agent_epsilon",
        [](double s, double c, double q, double delta) {
          return AgentEpsilon({s, c, q}, delta);
        },
        py::arg("s"), py::arg("c"), py::arg("q"), py::arg("delta") = 1.0);
  m.def("scale_for_epsilon", &ScaleForEpsilon, py::arg("epsilon"),
        py::arg("delta"), py::arg("s"), py::arg("q"));
  m.def("limit_variance",
        [](const Vector& s, const Vector& c, const Vector& q) {
          return LimitVariance(ScheduleFrom(s, c, q));
        },
        py::arg("s"), py::arg("c"), py::arg("q"));
  m.def("optimal_cost",
        [](const Vector& epsilon, double delta) {
          return OptimalCost(PrivacySpec{delta, epsilon});
        },
        py::arg("epsilon"), py::arg("delta") = 1.0);
  m.def("phi", &Phi, py::arg("alpha"), py::arg("s"));

  m.def("simulate", &Simulate, py::arg("adjacency"), py::arg("theta0"),
        py::arg("h"), py::arg("s"), py::arg("c"), py::arg("q"),
        py::arg("horizon"), py::arg("seed"),
        "Single run; returns theta, x, eta (agents x rounds) and summaries.");
  m.def("run_experiment", &Experiment, py::arg("config_text"),
        py::arg("threads") = 1,
        "Runs an experiment from config text; returns files and summary JSON.");
  m.def("report",
        [](const std::string& config_text) {
          ExperimentConfig config = ParseConfig(config_text);
          ValidateConfig(config);
          return GuaranteeReportJson(ReportFor(config));
        },
        py::arg("config_text"));
}
