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


#include <cmath>
#include <vector>

#include <doctest.h>

#include "wfdiff/measure.hpp"
#include "wfdiff/stats.hpp"

using namespace wfdiff;

TEST_CASE("sample summary") {
  const std::vector<double> v = {1, 2, 3, 4, 10};
  const MomentEstimate e = summarize(v, 1);
  CHECK(e.mean == doctest::Approx(4.0));
  // Sample variance (9 + 4 + 1 + 0 + 36) / 4 = 12.5.
  CHECK(e.std_error == doctest::Approx(std::sqrt(12.5 / 5)));
  CHECK(e.ci95_upper == doctest::Approx(4.0 + 1.959963984540054 * std::sqrt(2.5)));
  CHECK(e.censored_fraction == doctest::Approx(0.2));
  CHECK(e.n == 5);
  CHECK_THROWS(summarize(std::vector<double>{}));
  const std::vector<double> constant(10, 3.0);
  CHECK(summarize(constant).std_error == 0.0);
}

TEST_CASE("Wilson interval against the closed form") {
  for (auto [k, n] : {std::pair<std::size_t, std::size_t>{0, 10}, {3, 10},
                      {50, 100}, {999, 1000}, {1000, 1000}}) {
    const Proportion p = wilson(k, n);
    const double z = 1.959963984540054;
    const double ph = static_cast<double>(k) / static_cast<double>(n);
    const double nn = static_cast<double>(n);
    const double centre = (ph + z * z / (2 * nn)) / (1 + z * z / nn);
    const double half =
        z * std::sqrt(ph * (1 - ph) / nn + z * z / (4 * nn * nn)) / (1 + z * z / nn);
    CHECK(p.p == doctest::Approx(ph));
    CHECK(p.lo == doctest::Approx(centre - half));
    CHECK(p.hi == doctest::Approx(centre + half));
    CHECK(p.lo >= 0.0);
    CHECK(p.hi <= 1.0);
  }
}

TEST_CASE("least squares recovers an exact line") {
  const std::vector<double> x = {0, 1, 2, 3, 4};
  std::vector<double> y;
  for (double v : x) y.push_back(2.5 - 0.75 * v);
  const LinearFit f = least_squares(x, y);
  CHECK(f.slope == doctest::Approx(-0.75));
  CHECK(f.intercept == doctest::Approx(2.5));
  CHECK(f.residual_rms == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("quantiles interpolate") {
  const std::vector<double> s = {1, 2, 3, 4};
  CHECK(quantile_sorted(s, 0.0) == 1.0);
  CHECK(quantile_sorted(s, 1.0) == 4.0);
  CHECK(quantile_sorted(s, 0.5) == doctest::Approx(2.5));
}

TEST_CASE("binned TV and histogram") {
  const std::vector<double> p = {0.5, 0.5, 0.0};
  const std::vector<double> q = {0.25, 0.25, 0.5};
  CHECK(binned_tv(p, q) == doctest::Approx(0.5));
  CHECK(binned_tv(p, p) == 0.0);
  const std::vector<double> xs = {0.05, 0.15, 0.95, 0.999999, 0.5};
  const auto h = histogram(xs, 10);
  CHECK(h[0] == doctest::Approx(0.2));
  CHECK(h[1] == doctest::Approx(0.2));
  CHECK(h[5] == doctest::Approx(0.2));
  CHECK(h[9] == doctest::Approx(0.4));
  const auto e = uniform_edges(4);
  CHECK(e.size() == 5);
  CHECK(e.front() == 0.0);
  CHECK(e.back() == 1.0);
}

TEST_CASE("piecewise sampler inverts its cdf") {
  const std::vector<double> w = {0.1, 0.0, 0.6, 0.3};
  const PiecewiseSampler s(uniform_edges(4), w);
  CHECK(s.quantile(0.05) == doctest::Approx(0.125));
  CHECK(s.quantile(0.4) == doctest::Approx(0.625));
  CHECK(s.quantile(0.85) == doctest::Approx(0.875));
  // The empty cell is never returned.
  for (int i = 0; i <= 1000; ++i) {
    const double x = s.quantile(i / 1000.0);
    CHECK(x > 0.0);
    CHECK(x < 1.0);
    CHECK_FALSE((x > 0.25 && x < 0.5));
  }
}
