// Copyright 2026 The wfdiff Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wfdiff/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace wfdiff {

MomentEstimate summarize(std::span<const double> values,
                         std::size_t censored) {
  if (values.empty()) throw std::invalid_argument("summarize: empty sample");
  MomentEstimate e;
  e.n = values.size();
  const double n = static_cast<double>(e.n);
  double sum = 0.0;
  for (double v : values) sum += v;
  e.mean = sum / n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : values) {
    const double d = v - e.mean;
    const double d2 = d * d;
    m2 += d2;
    m4 += d2 * d2;
  }
  const double var = e.n > 1 ? m2 / (n - 1.0) : 0.0;
  e.std_error = std::sqrt(var / n);
  e.ci95_upper = e.mean + kZ95 * e.std_error;
  e.censored_fraction = static_cast<double>(censored) / n;
  const double pop_var = m2 / n;
  e.kurtosis = pop_var > 0.0 ? (m4 / n) / (pop_var * pop_var) : 0.0;
  e.heavy_tail = e.kurtosis > 9.0;
  return e;
}

Proportion wilson(std::size_t successes, std::size_t trials, double z) {
  Proportion out;
  out.successes = successes;
  out.trials = trials;
  if (trials == 0) {
    out.hi = 1.0;
    return out;
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  out.p = p;
  out.lo = std::max(0.0, centre - half);
  out.hi = std::min(1.0, centre + half);
  return out;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("least_squares: need >= 2 paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("least_squares: constant x");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    sse += r * r;
  }
  f.residual_rms = std::sqrt(sse / n);
  return f;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

}  // namespace wfdiff
