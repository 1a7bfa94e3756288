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

#ifndef WFDIFF_MEASURE_HPP
#define WFDIFF_MEASURE_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "wfdiff/model.hpp"
#include "wfdiff/rng.hpp"

namespace wfdiff {

// Binned probability measure on [0, 1].
struct EmpiricalMeasure {
  std::vector<double> edges;    // bins + 1 increasing edges, 0 and 1 included
  std::vector<double> weights;  // nonnegative, sum 1
  std::vector<double> std_error;  // per-bin, empty when not estimated

  std::size_t bins() const { return weights.size(); }
};

std::vector<double> uniform_edges(std::size_t bins);

inline std::size_t bin_of(double x, std::size_t bins) {
  const auto b = static_cast<std::size_t>(x * static_cast<double>(bins));
  return b < bins ? b : bins - 1;
}

// Half the l1 distance between two bin-mass vectors. For laws binned on the
// same edges this lower-bounds the total variation distance of the laws.
double binned_tv(std::span<const double> p, std::span<const double> q);

// Analytic mass of each bin under the stationary density.
std::vector<double> bin_masses(const StationaryDensity& density,
                               std::span<const double> edges);

// Normalized histogram of a sample.
std::vector<double> histogram(std::span<const double> xs, std::size_t bins);

// Inverse-CDF sampling from a piecewise-uniform law.
class PiecewiseSampler {
 public:
  PiecewiseSampler(std::vector<double> edges, std::span<const double> weights);

  static PiecewiseSampler from_measure(const EmpiricalMeasure& m);
  // Fine uniform table of the stationary law.
  static PiecewiseSampler from_density(const StationaryDensity& density,
                                       std::size_t cells = 4096);

  double operator()(Rng& rng) const;
  double quantile(double u) const;

 private:
  std::vector<double> edges_;
  std::vector<double> cdf_;  // cdf_[i] = mass of [0, edges_[i]]
};

}  // namespace wfdiff

#endif  // WFDIFF_MEASURE_HPP
