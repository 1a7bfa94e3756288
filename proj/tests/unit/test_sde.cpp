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


#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "wfdiff/parallel.hpp"
#include "wfdiff/rng.hpp"
#include "wfdiff/sde.hpp"

using namespace wfdiff;

namespace {

// Scale function of the theta1 = theta2 = eps = 1 WF diffusion:
// s'(x) = x^-2 (1 - x)^-2, s(x) = -1/x + 1/(1 - x) + 2 log(x / (1 - x)).
double scale_wf11(double x) {
  return -1.0 / x + 1.0 / (1.0 - x) + 2.0 * std::log(x / (1.0 - x));
}

}  // namespace

TEST_CASE("rng substreams are reproducible and distinct") {
  Rng a(5, 1), b(5, 1), c(5, 2), d(5, 1, 1), e(6, 1);
  const std::uint64_t va = a.bits();
  CHECK(va == b.bits());
  CHECK(va != c.bits());
  CHECK(va != d.bits());
  CHECK(va != e.bits());
  CHECK(derive_stream(1, 2) != derive_stream(2, 1));
  CHECK(stream_id("hitting") != stream_id("converge"));
  Rng r(9, 0);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(7) < 7);
  }
}

TEST_CASE("sim config validation") {
  SimConfig c;
  CHECK_NOTHROW(c.validate());
  c.dt = 0;
  CHECK_THROWS_AS(c.validate(), InvalidParams);
  c = {};
  c.t_max = -1;
  CHECK_THROWS_AS(c.validate(), InvalidParams);
  c = {};
  c.t_max = 0;
  CHECK_NOTHROW(c.validate());
  c = {};
  c.guard = 0.6;
  CHECK_THROWS_AS(c.validate(), InvalidParams);
  c = {};
  c.record_stride = 0;
  CHECK_THROWS_AS(c.validate(), InvalidParams);
}

TEST_CASE("paths stay inside (0, 1) and are reproducible") {
  const ModelSpec m = builtin_wf_mutation(1, 1, 1);
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_max = 5;
  cfg.seed = 3;
  const Path p = simulate_path(m, 1e-6, cfg, 0);
  CHECK(p.times.front() == 0.0);
  CHECK(p.times.back() == doctest::Approx(5.0));
  for (std::size_t i = 0; i < p.states.size(); ++i) {
    CHECK(p.states[i] > 0.0);
    CHECK(p.states[i] < 1.0);
    if (i) CHECK(p.times[i] > p.times[i - 1]);
  }
  const Path q = simulate_path(m, 1e-6, cfg, 0);
  CHECK(p.states == q.states);
  const Path r = simulate_path(m, 1e-6, cfg, 1);
  CHECK(p.states != r.states);

  cfg.record_stride = 7;
  const Path s = simulate_path(m, 1e-6, cfg, 0);
  CHECK(s.states[1] == p.states[7]);
  CHECK(s.times.back() == doctest::Approx(5.0));
  CHECK(s.states.back() == p.states.back());

  cfg.t_max = 0;
  const Path z = simulate_path(m, 0.3, cfg, 0);
  CHECK(z.states.size() == 1);
  CHECK_THROWS_AS(simulate_path(m, 0.0, SimConfig{}, 0), InvalidParams);
}

TEST_CASE("exhausted halvings raise a boundary breach") {
  ModelSpec m = builtin_wf_mutation(1, 1, 1);
  m.drift = [](double) { return 1e3; };
  SimConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_max = 1;
  cfg.max_halvings = 0;
  CHECK_THROWS_AS(simulate_path(m, 0.5, cfg, 0), BoundaryBreach);
}

TEST_CASE("stopping rules") {
  const auto up = StoppingRule::reach_above(0.1);
  CHECK(up.fired(0.1));
  CHECK_FALSE(up.fired(0.09));
  const auto down = StoppingRule::reach_below(0.1);
  CHECK(down.fired(0.9));
  CHECK_FALSE(down.fired(0.91));
  const auto mid = StoppingRule::enter_central(0.1);
  CHECK(mid.fired(0.5));
  CHECK_FALSE(mid.fired(0.05));
  CHECK_FALSE(mid.fired(0.95));
  const auto exit = StoppingRule::exit_interval(0.2, 0.8);
  CHECK(exit.fired(0.2));
  CHECK(exit.fired(0.85));
  CHECK_FALSE(exit.fired(0.5));
  CHECK(std::string(hitting_kind_name(mid.kind)) == "T_hat");
  CHECK(mid.labelled(HittingKind::kT1).kind == HittingKind::kT1);

  const ModelSpec m = builtin_wf_mutation(1, 1, 1);
  SimConfig cfg;
  const HittingSample now = first_hitting(m, 0.5, mid, cfg, 0);
  CHECK(now.value == 0.0);
  CHECK_FALSE(now.censored);
  cfg.t_max = 1e-3;
  const HittingSample late =
      first_hitting(m, 0.5, StoppingRule::reach_above(0.999), cfg, 0);
  CHECK(late.censored);
  CHECK(late.value == cfg.t_max);
}

TEST_CASE("mean of the WF diffusion follows its linear ODE") {
  // d E[X] / dt = t1 - (t1 + t2) E[X].
  const ModelSpec m = builtin_wf_mutation(1, 1, 1);
  SimConfig cfg;
  cfg.dt = 1e-3;
  const std::vector<double> times = {0.25, 1.0};
  const int n = 4000;
  std::vector<double> s(2, 0.0), s2(2, 0.0);
  for (int i = 0; i < n; ++i) {
    Rng rng(17, static_cast<std::uint64_t>(i));
    const auto xs = states_at(m, 0.05, times, cfg, rng);
    for (int k = 0; k < 2; ++k) {
      s[k] += xs[k];
      s2[k] += xs[k] * xs[k];
    }
  }
  for (int k = 0; k < 2; ++k) {
    const double mean = s[k] / n;
    const double se = std::sqrt((s2[k] / n - mean * mean) / n);
    const double exact = 0.5 + (0.05 - 0.5) * std::exp(-2.0 * times[k]);
    CAPTURE(k);
    CHECK(std::abs(mean - exact) < 4.0 * se + 2e-3);
  }
}

TEST_CASE("exit side probabilities match the scale function") {
  const ModelSpec m = builtin_wf_mutation(1, 1, 1);
  SimConfig cfg;
  cfg.dt = 1e-5;
  cfg.t_max = 50;
  const double x0 = 0.05, lo = 0.025, hi = 0.1;
  const int n = 2000;
  int lower = 0;
  for (int i = 0; i < n; ++i) {
    const HittingSample s = first_hitting(
        m, x0, StoppingRule::exit_interval(lo, hi), cfg, static_cast<std::uint64_t>(i));
    REQUIRE_FALSE(s.censored);
    lower += s.exit_state <= lo ? 1 : 0;
  }
  const double p = (scale_wf11(hi) - scale_wf11(x0)) /
                   (scale_wf11(hi) - scale_wf11(lo));
  const double phat = static_cast<double>(lower) / n;
  CHECK(std::abs(phat - p) < 4.0 * std::sqrt(p * (1 - p) / n) + 0.01);
}

TEST_CASE("paired runs meet and are reproducible") {
  const ModelSpec m = builtin_wf_mutation(1, 1, 1);
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_max = 50;
  const InitialSampler y = [](Rng& r) { return 0.2 + 0.6 * r.uniform(); };
  const CouplingSample a = simulate_pair_to_meeting(m, 0.05, y, cfg, 4);
  const CouplingSample b = simulate_pair_to_meeting(m, 0.05, y, cfg, 4);
  CHECK(a.L == b.L);
  CHECK(a.y0 == b.y0);
  CHECK_FALSE(a.censored);
  CHECK(a.L > 0.0);
  const CouplingSample same = simulate_pair_to_meeting(
      m, 0.3, [](Rng&) { return 0.3; }, cfg, 4);
  CHECK(same.L == 0.0);
  cfg.t_max = 1e-3;
  const CouplingSample cut = simulate_pair_to_meeting(
      m, 0.01, [](Rng&) { return 0.99; }, cfg, 4);
  CHECK(cut.censored);
}

TEST_CASE("parallel_for visits every index once and rethrows the lowest failure") {
  for (unsigned w : {1u, 2u, 5u}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), w, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) CHECK(h.load() == 1);
    try {
      parallel_for(1000, w, [](std::size_t i) {
        if (i == 130 || i == 700) throw std::runtime_error(std::to_string(i));
      });
      FAIL("no exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "130");
    }
  }
}
