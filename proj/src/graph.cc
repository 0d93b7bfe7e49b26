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

#include "dpcons/graph.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "dpcons/error.h"
#include "dpcons/io.h"
#include "dpcons/rng.h"

namespace dpcons {

namespace {

std::string Cell(std::size_t i, std::size_t j) {
  return "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
}

}  // namespace

WeightedGraph WeightedGraph::FromAdjacency(Matrix adjacency) {
  const std::size_t n = adjacency.rows();
  if (adjacency.cols() != n) {
    throw Error(ErrorCode::kNotSquare, "adjacency matrix is not square");
  }
  if (n < 2) {
    throw Error(ErrorCode::kTooFewNodes, "a graph needs at least 2 agents");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = adjacency(i, j);
      if (!std::isfinite(w)) {
        throw Error(ErrorCode::kNonFinite, "non-finite weight at " + Cell(i, j));
      }
      if (w < 0.0) {
        throw Error(ErrorCode::kNegativeWeight,
                    "negative weight at " + Cell(i, j));
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0.0) {
      throw Error(ErrorCode::kNonzeroDiagonal,
                  "nonzero self-loop weight at " + Cell(i, i));
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (adjacency(i, j) != adjacency(j, i)) {
        throw Error(ErrorCode::kAsymmetricAdjacency,
                    "weight " + Cell(i, j) + " differs from " + Cell(j, i));
      }
    }
  }
  return WeightedGraph(std::move(adjacency));
}

WeightedGraph::WeightedGraph(Matrix adjacency)
    : adjacency_(std::move(adjacency)) {
  const std::size_t n = adjacency_.rows();
  degrees_.assign(n, 0.0);
  neighbors_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = adjacency_(i, j);
      d += w;
      if (w != 0.0) neighbors_[i].push_back({j, w});
    }
    degrees_[i] = d;
    max_degree_ = std::max(max_degree_, d);
  }
}

Matrix Laplacian(const WeightedGraph& graph) {
  const std::size_t n = graph.size();
  Matrix lap(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) lap(i, j) = -graph.weight(i, j);
    }
    lap(i, i) = graph.degree(i);
  }
  return lap;
}

bool IsConnected(const WeightedGraph& graph) {
  const std::size_t n = graph.size();
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> frontier;
  seen[0] = true;
  frontier.push(0);
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop();
    for (const Neighbor& nb : graph.neighbors(i)) {
      if (!seen[nb.index]) {
        seen[nb.index] = true;
        ++reached;
        frontier.push(nb.index);
      }
    }
  }
  return reached == n;
}

SymmetricEigen JacobiEigen(const Matrix& symmetric, double tolerance) {
  const std::size_t n = symmetric.rows();
  Matrix a = symmetric;
  Matrix v = Matrix::Identity(n);

  auto off_norm = [&] {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) acc += a(i, j) * a(i, j);
      }
    }
    return std::sqrt(acc);
  };

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps && off_norm() >= tolerance;
       ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle that zeroes a(p, q) (Golub & Van Loan 8.5.2).
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = v(k, order[j]);
  }
  return out;
}

SpectralSummary ComputeSpectralSummary(const WeightedGraph& graph, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::kInvalidParameters, "step size must be positive");
  }
  if (h * graph.max_degree() >= 1.0) {
    throw Error(ErrorCode::kStepSizeTooLarge,
                "step size " + FormatDouble(h) + " is not below 1/d_max = " +
                    FormatDouble(1.0 / graph.max_degree()));
  }
  if (!IsConnected(graph)) {
    throw Error(ErrorCode::kDisconnected, "graph is not connected");
  }
  const std::size_t n = graph.size();
  const Matrix lap = Laplacian(graph);
  const double inv_n = 1.0 / static_cast<double>(n);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) = (i == j ? 1.0 : 0.0) - h * lap(i, j) - inv_n;
    }
  }
  const SymmetricEigen lap_eig = JacobiEigen(lap);
  const SymmetricEigen m_eig = JacobiEigen(m);

  SpectralSummary out;
  out.max_degree = graph.max_degree();
  out.step_size = h;
  out.laplacian_eigenvalues = lap_eig.values;
  std::size_t best = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (std::abs(m_eig.values[j]) > std::abs(m_eig.values[best])) best = j;
  }
  out.lambda_bar = std::abs(m_eig.values[best]);
  out.slowest_mode = m_eig.vectors.column(best);
  return out;
}

double DefaultStepSize(const WeightedGraph& graph) {
  return 1.0 / (2.0 * graph.max_degree());
}

WeightedGraph RandomGraph(std::size_t n, double p, std::uint64_t seed,
                          int max_attempts) {
  if (n < 2) {
    throw Error(ErrorCode::kTooFewNodes, "a graph needs at least 2 agents");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kInvalidProbability,
                "edge probability must lie in (0, 1)");
  }
  const std::uint64_t root = DomainKey(seed, StreamDomain::kGraph);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const CounterStream stream(DeriveKey(root, attempt));
    Matrix adjacency(n, n);
    std::uint64_t counter = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double b1 = stream.UniformOpen(counter++) < p ? 1.0 : 0.0;
        const double b2 = stream.UniformOpen(counter++) < p ? 1.0 : 0.0;
        adjacency(i, j) = b1 + b2;
        adjacency(j, i) = b1 + b2;
      }
    }
    auto graph = WeightedGraph::FromAdjacency(std::move(adjacency));
    if (IsConnected(graph)) return graph;
  }
  throw Error(ErrorCode::kConnectivityRetriesExhausted,
              "no connected graph after " + std::to_string(max_attempts) +
                  " attempts");
}

WeightedGraph ParseGraphCsv(const std::string& text) {
  const auto rows = ParseNumericCsv(text);
  for (const auto& row : rows) {
    if (row.size() != rows.size()) {
      throw Error(ErrorCode::kNotSquare,
                  "adjacency CSV must have n rows of n values");
    }
  }
  return WeightedGraph::FromAdjacency(Matrix::FromRows(rows));
}

WeightedGraph ReadGraphCsv(const std::filesystem::path& path) {
  return ParseGraphCsv(ReadTextFile(path));
}

std::string FormatGraphCsv(const WeightedGraph& graph) {
  std::string out;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    for (std::size_t j = 0; j < graph.size(); ++j) {
      if (j) out += ',';
      out += FormatDouble(graph.weight(i, j));
    }
    out += '\n';
  }
  return out;
}

void WriteGraphCsv(const WeightedGraph& graph,
                   const std::filesystem::path& path) {
  WriteTextFile(path, FormatGraphCsv(graph));
}

}  // namespace dpcons
