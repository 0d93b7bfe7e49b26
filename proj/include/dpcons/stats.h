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

#ifndef DPCONS_STATS_H_
#define DPCONS_STATS_H_

#include <cmath>
#include <span>

namespace dpcons {

// Neumaier-compensated running sum. Results depend only on the order of
// Add calls.
class CompensatedSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct SampleMoments {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;         // unbiased (n - 1); 0 for a single sample
  double skewness = 0.0;         // g1 = m3 / m2^(3/2)
  double excess_kurtosis = 0.0;  // g2 = m4 / m2^2 - 3
};

// Two-pass moments with compensated sums in index order.
SampleMoments ComputeMoments(std::span<const double> samples);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares y ~ intercept + slope * x.
LinearFit FitLine(std::span<const double> x, std::span<const double> y);

}  // namespace dpcons

#endif  // DPCONS_STATS_H_
