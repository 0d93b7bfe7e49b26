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

#ifndef DPCONS_GRAPH_H_
#define DPCONS_GRAPH_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dpcons/matrix.h"

namespace dpcons {

struct Neighbor {
  std::size_t index;
  double weight;
};

// Weighted undirected graph over agents 0..n-1. Immutable after
// construction; the adjacency is validated symmetric, nonnegative and
// zero on the diagonal.
class WeightedGraph {
 public:
  // Throws kNotSquare, kTooFewNodes, kNonFinite, kNegativeWeight,
  // kNonzeroDiagonal or kAsymmetricAdjacency.
  static WeightedGraph FromAdjacency(Matrix adjacency);

  std::size_t size() const { return adjacency_.rows(); }
  const Matrix& adjacency() const { return adjacency_; }
  double weight(std::size_t i, std::size_t j) const {
    return adjacency_(i, j);
  }

  // Nonzero-weight neighbors of i, ascending by index.
  std::span<const Neighbor> neighbors(std::size_t i) const {
    return neighbors_[i];
  }

  // Weighted degree d_i = sum_j a_ij.
  double degree(std::size_t i) const { return degrees_[i]; }
  const Vector& degrees() const { return degrees_; }
  double max_degree() const { return max_degree_; }

  friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return a.adjacency_ == b.adjacency_;
  }

 private:
  explicit WeightedGraph(Matrix adjacency);

  Matrix adjacency_;
  Vector degrees_;
  double max_degree_ = 0.0;
  std::vector<std::vector<Neighbor>> neighbors_;
};

// L = D - A. Off-diagonals are the negated weights and each diagonal is the
// row sum of the weights, so L is bitwise symmetric.
Matrix Laplacian(const WeightedGraph& graph);

// Breadth-first reachability from agent 0 over nonzero weights.
bool IsConnected(const WeightedGraph& graph);

struct SymmetricEigen {
  Vector values;        // ascending
  Matrix vectors;       // column j is the unit eigenvector of values[j]
};

// Cyclic Jacobi rotations; stops once the off-diagonal Frobenius norm falls
// below `tolerance`.
SymmetricEigen JacobiEigen(const Matrix& symmetric, double tolerance = 1e-12);

struct SpectralSummary {
  double max_degree = 0.0;
  double step_size = 0.0;
  // Spectral radius of I - hL - (1/n) 11^T.
  double lambda_bar = 0.0;
  Vector laplacian_eigenvalues;  // ascending
  // Unit eigenvector of I - hL - (1/n) 11^T attaining lambda_bar; it is
  // orthogonal to the all-ones vector.
  Vector slowest_mode;
};

// Requires a connected graph and 0 < h < 1/d_max (kDisconnected,
// kStepSizeTooLarge, kInvalidParameters).
SpectralSummary ComputeSpectralSummary(const WeightedGraph& graph, double h);

// h = 1 / (2 d_max).
double DefaultStepSize(const WeightedGraph& graph);

inline constexpr int kDefaultConnectivityRetries = 1000;

// Each upper-triangle weight is B1 + B2 with B1, B2 ~ Bernoulli(p) i.i.d.,
// mirrored below the diagonal. Disconnected draws are discarded and redrawn
// from the next attempt's stream; throws kConnectivityRetriesExhausted after
// `max_attempts` failures.
WeightedGraph RandomGraph(std::size_t n, double p, std::uint64_t seed,
                          int max_attempts = kDefaultConnectivityRetries);

// Header-less CSV, one row of n comma-separated weights per agent.
WeightedGraph ReadGraphCsv(const std::filesystem::path& path);
WeightedGraph ParseGraphCsv(const std::string& text);
std::string FormatGraphCsv(const WeightedGraph& graph);
void WriteGraphCsv(const WeightedGraph& graph,
                   const std::filesystem::path& path);

}  // namespace dpcons

#endif  // DPCONS_GRAPH_H_
