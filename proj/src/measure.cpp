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

#include "wfdiff/measure.hpp"

#include <algorithm>
#include <cmath>

#include "wfdiff/error.hpp"

namespace wfdiff {

std::vector<double> uniform_edges(std::size_t bins) {
  if (bins == 0) throw InvalidParams("bins must be positive");
  std::vector<double> e(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    e[i] = static_cast<double>(i) / static_cast<double>(bins);
  }
  return e;
}

double binned_tv(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidParams("binned_tv: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return std::min(1.0, 0.5 * s);
}

std::vector<double> bin_masses(const StationaryDensity& density,
                               std::span<const double> edges) {
  std::vector<double> cdf(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) cdf[i] = density.cdf(edges[i]);
  std::vector<double> out(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    out[i] = std::max(0.0, cdf[i + 1] - cdf[i]);
  }
  return out;
}

std::vector<double> histogram(std::span<const double> xs, std::size_t bins) {
  std::vector<double> h(bins, 0.0);
  if (xs.empty()) return h;
  for (double x : xs) h[bin_of(x, bins)] += 1.0;
  const double n = static_cast<double>(xs.size());
  for (double& v : h) v /= n;
  return h;
}

PiecewiseSampler::PiecewiseSampler(std::vector<double> edges,
                                   std::span<const double> weights)
    : edges_(std::move(edges)) {
  if (edges_.size() != weights.size() + 1 || weights.empty()) {
    throw InvalidParams("sampler: edges/weights size mismatch");
  }
  cdf_.resize(edges_.size());
  cdf_[0] = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw InvalidParams("sampler: negative weight");
    cdf_[i + 1] = cdf_[i] + weights[i];
  }
  const double total = cdf_.back();
  if (!(total > 0.0)) throw InvalidParams("sampler: zero total mass");
  for (double& c : cdf_) c /= total;
}

PiecewiseSampler PiecewiseSampler::from_measure(const EmpiricalMeasure& m) {
  return PiecewiseSampler(m.edges, m.weights);
}

PiecewiseSampler PiecewiseSampler::from_density(
    const StationaryDensity& density, std::size_t cells) {
  std::vector<double> edges = uniform_edges(cells);
  const std::vector<double> w = bin_masses(density, edges);
  return PiecewiseSampler(std::move(edges), w);
}

double PiecewiseSampler::quantile(double u) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  std::size_t i = it == cdf_.begin() ? 0 : static_cast<std::size_t>(it - cdf_.begin()) - 1;
  if (i + 1 >= cdf_.size()) i = cdf_.size() - 2;
  // Skip empty cells so the result has positive density.
  while (cdf_[i + 1] <= cdf_[i] && i + 2 < cdf_.size()) ++i;
  const double w = cdf_[i + 1] - cdf_[i];
  const double frac = w > 0.0 ? std::clamp((u - cdf_[i]) / w, 0.0, 1.0) : 0.5;
  double x = edges_[i] + frac * (edges_[i + 1] - edges_[i]);
  if (!(x > 0.0)) x = 1e-3 * edges_[i + 1];
  if (!(x < 1.0)) x = std::nextafter(1.0, 0.0);
  return x;
}

double PiecewiseSampler::operator()(Rng& rng) const {
  return quantile(rng.uniform());
}

}  // namespace wfdiff
