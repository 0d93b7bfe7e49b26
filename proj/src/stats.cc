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

#include "dpcons/stats.h"

#include "dpcons/error.h"

namespace dpcons {

SampleMoments ComputeMoments(std::span<const double> samples) {
  SampleMoments out;
  out.count = samples.size();
  if (samples.empty()) return out;
  CompensatedSum sum;
  for (double x : samples) sum.Add(x);
  const double n = static_cast<double>(samples.size());
  out.mean = sum.value() / n;
  CompensatedSum m2, m3, m4;
  for (double x : samples) {
    const double d = x - out.mean;
    const double d2 = d * d;
    m2.Add(d2);
    m3.Add(d2 * d);
    m4.Add(d2 * d2);
  }
  if (samples.size() > 1) out.variance = m2.value() / (n - 1.0);
  const double c2 = m2.value() / n;
  if (c2 > 0.0) {
    out.skewness = (m3.value() / n) / std::pow(c2, 1.5);
    out.excess_kurtosis = (m4.value() / n) / (c2 * c2) - 3.0;
  }
  return out;
}

LinearFit FitLine(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kInvalidParameters,
                "line fit needs two or more paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) {
    throw Error(ErrorCode::kInvalidParameters, "x values are all equal");
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace dpcons
