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

#ifndef WFDIFF_STATS_HPP
#define WFDIFF_STATS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace wfdiff {

inline constexpr double kZ95 = 1.959963984540054;

// Sample mean with a normal-approximation 95% upper confidence bound.
struct MomentEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  double ci95_upper = 0.0;
  double censored_fraction = 0.0;
  double kurtosis = 0.0;  // sample kurtosis (3 for a normal law)
  bool heavy_tail = false;  // kurtosis > 9
};

MomentEstimate summarize(std::span<const double> values,
                         std::size_t censored = 0);

struct Proportion {
  double p = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t successes = 0;
  std::size_t trials = 0;
};

// Wilson score interval; well-behaved at p = 0 and p = 1.
Proportion wilson(std::size_t successes, std::size_t trials, double z = kZ95);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

// Linear interpolation between order statistics of an ascending sample.
double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace wfdiff

#endif  // WFDIFF_STATS_HPP
