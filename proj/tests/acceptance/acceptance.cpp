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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fmt/format.h>

#include "wfdiff/convergence.hpp"
#include "wfdiff/invariant.hpp"
#include "wfdiff/measure.hpp"
#include "wfdiff/model.hpp"
#include "wfdiff/recurrence.hpp"
#include "wfdiff/sde.hpp"

namespace fs = std::filesystem;
using namespace wfdiff;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += "; FAILED " + what;
    }
  }
  void note(const std::string& what) {
    detail += detail.empty() ? what : "; " + what;
  }
};

unsigned workers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

ModelSpec hand_envelope() { return wf_mutation_with_envelope(1, 1, 1, 0.1, 0.1); }

// Beta(2, 2) distribution function.
double beta22_cdf(double x) { return x * x * (3.0 - 2.0 * x); }

Outcome criterion1() {
  Outcome o;
  const ModelSpec model = hand_envelope();
  const auto report = validate_envelope(model);
  o.require(report.passed(), "validate_envelope: " + report.summary());
  o.require(std::abs(model.b0 - 0.8) <= 1e-12, "b0 == 0.8");
  o.require(std::abs(model.b1 + 0.8) <= 1e-12, "b1 == -0.8");
  const OpenInterval w = admissible_m_interval(model);
  o.require(std::abs(w.lo) <= 1e-12 && std::abs(w.hi - 0.6) <= 1e-12,
            "interval (0, 0.6)");
  const BoundParams p = make_bound_params(model, 0.5, 1.0);
  o.require(std::abs(p.C_lower - 80.0) <= 1e-12, "C_lower(0.5) == 80");
  o.require(std::abs(p.C_upper - 80.0) <= 1e-12, "C_upper(0.5) == 80");
  o.note(fmt::format("interval=({:.15g}, {:.15g}) C_lower={:.15g} C_upper={:.15g}",
                     w.lo, w.hi, p.C_lower, p.C_upper));
  return o;
}

Outcome criterion2() {
  Outcome o;
  const ModelSpec model = builtin_wf_mutation(1, 1, 1);
  SimConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_max = 50.0;
  cfg.seed = 2001;
  cfg.record_stride = 100;
  constexpr std::size_t kPaths = 1000;
  std::size_t breaches = 0;
  std::size_t outside = 0;
  std::size_t points = 0;
  for (std::size_t i = 0; i < kPaths; ++i) {
    const double x0 = i % 2 == 0 ? 0.05 : 0.95;
    try {
      const Path path = simulate_path(model, x0, cfg, i);
      for (double x : path.states) {
        ++points;
        if (!(x > 0.0 && x < 1.0)) ++outside;
      }
    } catch (const BoundaryBreach&) {
      ++breaches;
    }
  }
  o.require(breaches == 0, "zero boundary breaches");
  o.require(outside == 0, "all recorded states in (0, 1)");
  o.note(fmt::format("paths={} breaches={} recorded={} outside={}", kPaths,
                     breaches, points, outside));

  SimConfig exit_cfg = cfg;
  exit_cfg.seed = 2002;
  exit_cfg.record_stride = 1;
  const std::vector<double> lowers = {0.025, 0.0125, 0.00625};
  const auto rows = lemma1_exit_experiment(model, 0.05, lowers, 0.1, 10000,
                                           exit_cfg, {workers()});
  std::size_t censored = 0;
  for (const auto& r : rows) {
    censored += r.censored;
    o.note(fmt::format("P(exit at {})={:.4f} [{:.4f}, {:.4f}]", r.lower,
                       r.lower_exit.p, r.lower_exit.lo, r.lower_exit.hi));
  }
  o.require(censored == 0, "no censored exit runs");
  o.require(strictly_decreasing(rows), "exit table strictly decreasing");
  return o;
}

struct BoundCase {
  std::string label;
  ModelSpec model;
  double c;
};

void record(Outcome& o, const BoundCheckReport& r, const std::string& label) {
  const bool ok = r.verdict == Verdict::kPass && r.lhs.censored_fraction == 0.0;
  o.require(ok, fmt::format("{} {} x0={:.6g}: ci95_upper={:.6g} rhs={:.6g} "
                            "censored={:.3g}",
                            label, r.check, r.x0, r.lhs.ci95_upper, r.rhs,
                            r.lhs.censored_fraction));
}

// Criteria 3 and 4 share one set of configurations.
void criteria3and4(Outcome& c3, Outcome& c4) {
  std::vector<BoundCase> cases;
  for (double c : {0.1, 0.375, 1.0, 5.0}) cases.push_back({"hand", hand_envelope(), c});
  cases.push_back({"builtin", builtin_wf_mutation(1, 1, 1), 1.0});
  SimConfig cfg;
  cfg.t_max = 50.0;
  constexpr std::size_t kN = 10000;
  const RunOptions run{workers()};
  std::uint64_t seed = 3000;
  std::size_t n3 = 0;
  std::size_t n4 = 0;
  double worst3 = 0.0;
  double worst4 = 0.0;
  for (const auto& bc : cases) {
    const BoundParams p = make_bound_params(bc.model, 0.5, bc.c);
    const double lo = p.alpha / 2.0;
    const double hi = 1.0 - p.alpha / 2.0;
    // Euler steps must stay small relative to the threshold scale.
    const double dt = std::min(1e-4, 1e-3 * p.alpha);
    const std::string label =
        fmt::format("{} c={} alpha={:.6g} dt={:.3g}", bc.label, bc.c, p.alpha, dt);
    auto next = [&] {
      SimConfig s = cfg;
      s.dt = dt;
      s.seed = seed++;
      return s;
    };
    for (const auto& r : {check_prop1(bc.model, lo, p, kN, next(), run),
                          check_prop2(bc.model, hi, p, kN, next(), run),
                          check_thm1(bc.model, lo, p, kN, next(), run),
                          check_thm1(bc.model, hi, p, kN, next(), run)}) {
      record(c3, r, label);
      worst3 = std::max(worst3, r.lhs.ci95_upper / r.rhs);
      ++n3;
    }
    for (const auto& r :
         {check_occupation_bound(bc.model, lo, p, kN, next(), Side::kLower, run),
          check_occupation_bound(bc.model, hi, p, kN, next(), Side::kUpper, run),
          check_occupation_bound(bc.model, lo, p, kN, next(), Side::kBoth, run),
          check_occupation_bound(bc.model, hi, p, kN, next(), Side::kBoth, run)}) {
      record(c4, r, label);
      worst4 = std::max(worst4, r.lhs.ci95_upper / r.rhs);
      ++n4;
    }
  }
  c3.note(fmt::format("{} checks, max ci95_upper/rhs={:.4g}", n3, worst3));
  c4.note(fmt::format("{} checks, max ci95_upper/rhs={:.4g}", n4, worst4));
}

double moment_oracle() {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [](double x, double xc) {
    const double y = x < 0.5 ? x : 1.0 - xc;
    const double w = x < 0.5 ? 1.0 - x : xc;
    return (1.0 / std::sqrt(y) + 1.0 / std::sqrt(w)) * 6.0 * y * w;
  };
  return ts.integrate(f, 0.0, 1.0);
}

void criteria5and6(Outcome& c5, Outcome& c6) {
  const ModelSpec model = builtin_wf_mutation(1, 1, 1);
  const CycleConfig cyc(0.1, 0.2, 200, {0.5});
  SimConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_max = 200.0;
  cfg.seed = 5001;
  const CycleRun run = run_cycle_chains(model, cyc, 4, 5000, cfg, {workers()});
  const ChainEstimate chain = estimate_chain(run.records);
  const EmpiricalMeasure mu = khasminskii_measure(run.records, chain);
  std::vector<double> ref(mu.bins());
  for (std::size_t i = 0; i < mu.bins(); ++i) {
    ref[i] = beta22_cdf(mu.edges[i + 1]) - beta22_cdf(mu.edges[i]);
  }
  const double tv = binned_tv(mu.weights, ref);
  c5.require(run.records.size() == 20000, "20000 cycles recorded");
  c5.require(tv <= 0.05, "binned TV <= 0.05");
  const bool sym = symmetric_within_ci(chain);
  c5.require(sym, "chain symmetric within 95% CI");
  c5.note(fmt::format("cycles={} aborted={} tv={:.5f} P=[[{:.4f},{:.4f}],[{:.4f},{:.4f}]]",
                      run.records.size(), run.aborted, tv, chain.transition[0][0],
                      chain.transition[0][1], chain.transition[1][0],
                      chain.transition[1][1]));

  const double oracle = moment_oracle();
  c6.require(std::abs(oracle - 3.2) <= 1e-9, "oracle integral equals 16/5");
  const MomentEstimate est = moment_I(run, chain, 0.5, model);
  const double rel = std::abs(est.mean - oracle) / oracle;
  c6.require(rel <= 0.10, "I(0.5) within 10% of the oracle");
  c6.note(fmt::format("estimate={:.5f} se={:.5f} oracle={:.12f} rel_err={:.4f}",
                      est.mean, est.std_error, oracle, rel));
}

void criteria7and8(Outcome& c7, Outcome& c8) {
  const ModelSpec model = builtin_wf_mutation(1, 1, 1);
  const BoundParams p = make_bound_params(model, 0.5, 0.1, 0.01);
  const std::vector<double> times = {1, 2, 5, 10, 20};
  constexpr std::size_t kReplicas = 100000;
  constexpr std::size_t kBins = 50;
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_max = 20.0;
  const RunOptions run{workers()};

  cfg.seed = 7001;
  const Thm2Report a = check_thm2(model, 0.05, p, times, kReplicas, kBins, cfg, run, 200);
  cfg.seed = 7002;
  const Thm2Report b = check_thm2(model, 0.95, p, times, kReplicas, kBins, cfg, run, 200);
  for (std::size_t k = 0; k < times.size(); ++k) {
    c7.note(fmt::format("t={} tv={:.5f} ci={:.5f} rhs={:.5f}", times[k],
                        a.curve.tv_binned[k], a.curve.ci[k], a.rhs[k]));
    c7.require(a.curve.tv_binned[k] + a.curve.ci[k] <= a.rhs[k],
               fmt::format("tv + ci <= rhs at t={}", times[k]));
  }
  c7.require(a.pass, "check_thm2 pass flag");
  c7.require(a.slope.ci_hi < 0.0, "log-TV slope CI below 0");
  c7.note(fmt::format("slope={:.4f} [{:.4f}, {:.4f}]", a.slope.slope, a.slope.ci_lo,
                      a.slope.ci_hi));
  const std::size_t last = times.size() - 1;
  c7.require(curves_agree(a.curve, b.curve, last),
             "curves from 0.05 and 0.95 agree at t=20");
  c7.note(fmt::format("t=20 tv(0.05)={:.5f} tv(0.95)={:.5f} ci={:.5f}+{:.5f}",
                      a.curve.tv_binned[last], b.curve.tv_binned[last],
                      a.curve.ci[last], b.curve.ci[last]));

  const StationaryDensity density(model);
  const auto sampler = std::make_shared<PiecewiseSampler>(
      PiecewiseSampler::from_density(density));
  SimConfig pair_cfg = cfg;
  pair_cfg.seed = 8001;
  const MeetingTail tail = meeting_tail(
      model, 0.05, [sampler](Rng& rng) { return (*sampler)(rng); }, 10000, times,
      pair_cfg, run, 200);
  for (std::size_t k = 0; k < times.size(); ++k) {
    c8.note(fmt::format("t={} 2P(L>t)={:.5f} tv-ci={:.5f}", times[k],
                        2.0 * tail.survival[k],
                        a.curve.tv_binned[k] - a.curve.ci[k]));
  }
  c8.require(coupling_consistent(a.curve, tail), "2P(L>t) >= tv - ci at all times");
  c8.require(tail.fit.valid, "tail fit valid: " + tail.fit.note);
  c8.require(tail.fit.lambda_hat > 0.0 && tail.fit.lambda_lo > 0.0,
             "lambda_hat > 0 with positive lower CI bound");
  c8.note(fmt::format("lambda={:.4f} [{:.4f}, {:.4f}] censored={:.4g}",
                      tail.fit.lambda_hat, tail.fit.lambda_lo, tail.fit.lambda_hi,
                      tail.censored_fraction));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(WFDIFF_TOOL_PATH) + " " + args + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Outcome criterion9() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() /
                       ("wfdiff_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path cfg = dir / "suite.ini";
  std::ofstream(cfg) << R"(seed = 20261014
[model]
family = wf_mutation
theta1 = 1
theta2 = 1
epsilon = 1
[sim]
dt = 1e-3
t_max = 50
[hitting]
dt = 1e-5
n = 500
lemma1_n = 500
c = 0.1, 1
[invariant]
chains = 4
cycles_per_chain = 100
bins = 50
[converge]
replicas = 4000
bins = 20
times = 1, 2, 5
pairs = 500
resamples = 50
)";
  const fs::path a = dir / "w1";
  const fs::path b = dir / "w3";
  const int ra = run_tool(fmt::format("all --config {} --out {} --workers 1 --svg",
                                      cfg.string(), a.string()));
  const int rb = run_tool(fmt::format("all --config {} --out {} --workers 3 --svg",
                                      cfg.string(), b.string()));
  o.require(ra == rb, fmt::format("same exit status ({} vs {})", ra, rb));
  o.require(ra == 0 || ra == 3, fmt::format("suite completed (status {})", ra));
  std::size_t files = 0;
  std::size_t differing = 0;
  if (fs::exists(a)) {
    for (const auto& entry : fs::directory_iterator(a)) {
      ++files;
      const fs::path other = b / entry.path().filename();
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
        ++differing;
        o.require(false, "identical " + entry.path().filename().string());
      }
    }
  }
  std::size_t files_b = 0;
  if (fs::exists(b)) {
    for ([[maybe_unused]] const auto& entry : fs::directory_iterator(b)) ++files_b;
  }
  o.require(files >= 10, "all output files present");
  o.require(files == files_b, "same file set");
  o.note(fmt::format("exit={} files={} differing={}", ra, files, differing));
  std::error_code ec;
  fs::remove_all(dir, ec);
  return o;
}

template <class Fn>
double timed(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Runs a block, turning an exception into failures of its criteria.
template <class Fn>
double guarded(std::vector<Outcome*> outs, Fn&& fn) {
  return timed([&] {
    try {
      fn();
    } catch (const std::exception& e) {
      for (auto* o : outs) o->require(false, std::string("exception: ") + e.what());
    }
  });
}

}  // namespace

int main() {
  std::vector<Outcome> out(10);
  std::vector<double> secs(10, 0.0);
  secs[1] = guarded({&out[1]}, [&] { out[1] = criterion1(); });
  secs[2] = guarded({&out[2]}, [&] { out[2] = criterion2(); });
  secs[3] = secs[4] = guarded({&out[3], &out[4]}, [&] { criteria3and4(out[3], out[4]); });
  secs[5] = secs[6] = guarded({&out[5], &out[6]}, [&] { criteria5and6(out[5], out[6]); });
  secs[7] = secs[8] = guarded({&out[7], &out[8]}, [&] { criteria7and8(out[7], out[8]); });
  secs[9] = guarded({&out[9]}, [&] { out[9] = criterion9(); });
  bool all = true;
  for (int i = 1; i <= 9; ++i) {
    all = all && out[i].pass;
    std::cout << (out[i].pass ? "PASS" : "FAIL") << " criterion " << i << " ("
              << fmt::format("{:.1f}", secs[i]) << " s): " << out[i].detail << "\n";
  }
  return all ? 0 : 1;
}
