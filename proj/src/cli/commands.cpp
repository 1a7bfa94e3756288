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


#include "wfdiff/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "wfdiff/cli/output.hpp"
#include "wfdiff/convergence.hpp"
#include "wfdiff/expr.hpp"
#include "wfdiff/invariant.hpp"
#include "wfdiff/measure.hpp"
#include "wfdiff/recurrence.hpp"
#include "wfdiff/rng.hpp"

namespace wfdiff::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class... Args>
void say(const RunContext& ctx, fmt::format_string<Args...> f, Args&&... args) {
  if (ctx.log) {
    *ctx.log << fmt::format(f, std::forward<Args>(args)...) << '\n';
    ctx.log->flush();
  }
}

// Buffers every artifact of a command and writes them after all compute
// has finished.
class Artifacts {
 public:
  explicit Artifacts(const ExperimentConfig& cfg)
      : dir_(cfg.out_dir), prov_{cfg.hash, cfg.seed} {}

  void table(const std::string& name, const CsvTable& t) {
    files_.emplace_back(name, t.render(prov_.line()));
  }
  void text(const std::string& name, std::string body) {
    files_.emplace_back(name, std::move(body));
  }
  const Provenance& provenance() const { return prov_; }

  void flush() const {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) {
      throw ConfigIoError(
          fmt::format("cannot create {}: {}", dir_.string(), ec.message()));
    }
    for (const auto& [name, body] : files_) write_text(dir_ / name, body);
  }

 private:
  fs::path dir_;
  Provenance prov_;
  std::vector<std::pair<std::string, std::string>> files_;
};

ModelSpec checked_model(const ExperimentConfig& cfg) {
  ModelSpec m = cfg.model.build();
  const ValidationReport report = validate_envelope(m, cfg.validation);
  if (!report.passed()) {
    throw InvalidModel("model fails validation: " + report.summary());
  }
  return m;
}

SimConfig sim_for(const ExperimentConfig& cfg, std::uint64_t seed) {
  SimConfig s = cfg.sim;
  s.seed = seed;
  return s;
}

std::string witness_cell(const std::optional<double>& w) {
  return w ? cell(*w) : std::string();
}

}  // namespace

std::uint64_t command_seed(std::uint64_t master, std::string_view command) {
  return derive_stream(master, stream_id(command));
}

// ---------------------------------------------------------------------------

int cmd_validate(const ExperimentConfig& cfg, const RunContext& ctx) {
  const ModelSpec model = cfg.model.build();
  const ValidationReport report = validate_envelope(model, cfg.validation);

  Artifacts out(cfg);
  CsvTable checks({"condition", "passed", "witness", "detail"});
  for (const auto& c : report.checks) {
    checks.row(condition_name(c.condition), c.passed, witness_cell(c.witness),
               c.detail);
  }
  out.table("validation.csv", checks);

  CsvTable window({"model", "m_lo", "m_hi", "beta0", "b0", "beta1", "b1",
                   "max_certified_alpha"});
  if (report.passed()) {
    const OpenInterval w = admissible_m_interval(model, cfg.validation);
    window.row(model.label, w.lo, w.hi, model.beta0, model.b0, model.beta1,
               model.b1, max_certified_threshold(model, cfg.validation));
    say(ctx, "{}: valid, admissible m in ({}, {})", model.label, w.lo, w.hi);
  } else {
    window.row(model.label, kNaN, kNaN, model.beta0, model.b0, model.beta1,
               model.b1, kNaN);
    say(ctx, "{}: invalid: {}", model.label, report.summary());
  }
  out.table("m_interval.csv", window);
  out.flush();
  return report.passed() ? kExitOk : kExitInvalid;
}

// ---------------------------------------------------------------------------

int cmd_hitting(const ExperimentConfig& cfg, const RunContext& ctx) {
  const HittingBlock& h = cfg.hitting;
  const std::uint64_t seed = command_seed(cfg.seed, "hitting");
  const ModelSpec model = checked_model(cfg);
  SimConfig sim = sim_for(cfg, seed);
  if (h.dt) sim.dt = *h.dt;
  const RunOptions run{ctx.workers};

  // All parameter sets are built before any simulation.
  std::vector<BoundParams> params;
  for (double c : h.c) {
    params.push_back(make_bound_params(model, h.m, c, h.alpha, cfg.validation));
  }
  auto wants = [&](const char* name) {
    return std::find(h.checks.begin(), h.checks.end(), name) != h.checks.end();
  };

  std::vector<BoundCheckReport> reports;
  for (const BoundParams& p : params) {
    const double lo = 0.5 * p.alpha;
    const double hi = 1.0 - 0.5 * p.alpha;
    say(ctx, "hitting: m={} c={} alpha={} C_max={}", p.m, p.c, p.alpha, p.C_max);
    if (wants("prop1")) reports.push_back(check_prop1(model, lo, p, h.n, sim, run));
    if (wants("prop2")) reports.push_back(check_prop2(model, hi, p, h.n, sim, run));
    if (wants("thm1")) {
      for (double x0 : {lo, hi, 0.5}) {
        reports.push_back(check_thm1(model, x0, p, h.n, sim, run));
      }
    }
    if (wants("occupation")) {
      reports.push_back(
          check_occupation_bound(model, lo, p, h.n, sim, Side::kLower, run));
      reports.push_back(
          check_occupation_bound(model, hi, p, h.n, sim, Side::kUpper, run));
      for (double x0 : {lo, hi}) {
        reports.push_back(
            check_occupation_bound(model, x0, p, h.n, sim, Side::kBoth, run));
      }
    }
  }

  Artifacts out(cfg);
  CsvTable table({"check", "x0", "alpha", "m", "c", "lhs_mean", "lhs_ci95u",
                  "rhs", "censored_frac", "verdict"});
  bool any_fail = false;
  bool any_inconclusive = false;
  for (const auto& r : reports) {
    table.row(r.check, r.x0, r.params.alpha, r.params.m, r.params.c, r.lhs.mean,
              r.lhs.ci95_upper, r.rhs, r.lhs.censored_fraction,
              verdict_name(r.verdict));
    any_fail |= r.verdict == Verdict::kFail;
    any_inconclusive |= r.verdict == Verdict::kInconclusive;
    say(ctx, "  {:<17} x0={:<10.4g} lhs_ci95u={:<12.6g} rhs={:<12.6g} {}",
        r.check, r.x0, r.lhs.ci95_upper, r.rhs, verdict_name(r.verdict));
  }
  out.table("hitting_report.csv", table);

  if (h.lemma1_n > 0) {
    const auto rows = lemma1_exit_experiment(model, h.lemma1_x0, h.lemma1_lowers,
                                             h.lemma1_upper, h.lemma1_n, sim, run);
    const bool decreasing = strictly_decreasing(rows);
    CsvTable t({"lower", "upper", "x0", "trials", "lower_exit", "wilson_lo",
                "wilson_hi", "censored", "strictly_decreasing"});
    for (const auto& r : rows) {
      t.row(r.lower, h.lemma1_upper, h.lemma1_x0, r.lower_exit.trials,
            r.lower_exit.p, r.lower_exit.lo, r.lower_exit.hi, r.censored,
            decreasing);
    }
    out.table("lemma1.csv", t);
    say(ctx, "lemma1: exit-side probabilities strictly decreasing: {}",
        decreasing);
  }

  if (h.dump_samples) {
    const BoundParams& p = params.front();
    CsvTable t({"replica", "kind", "value", "censored", "exit_state"});
    const std::pair<double, StoppingRule> runs[] = {
        {0.5 * p.alpha, StoppingRule::reach_above(p.alpha)},
        {1.0 - 0.5 * p.alpha, StoppingRule::reach_below(p.alpha)},
    };
    for (const auto& [x0, rule] : runs) {
      const HittingRun hr = sample_hitting(model, x0, rule, h.n, sim, run);
      for (std::size_t i = 0; i < hr.samples.size(); ++i) {
        const HittingSample& s = hr.samples[i];
        t.row(i, hitting_kind_name(s.kind), s.value, s.censored, s.exit_state);
      }
    }
    out.table("hitting_samples.csv", t);
  }

  if (h.dump_path) {
    SimConfig ps = sim;
    ps.t_max = h.path_t_max;
    ps.record_stride = h.path_stride;
    const Path path = simulate_path(model, h.path_x0, ps, stream_id("path"));
    CsvTable t({"t", "x"});
    for (std::size_t i = 0; i < path.times.size(); ++i) {
      t.row(path.times[i], path.states[i]);
    }
    out.table("path.csv", t);
  }

  out.flush();
  if (any_fail) return kExitInvalid;
  if (any_inconclusive) return kExitInconclusive;
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_invariant(const ExperimentConfig& cfg, const RunContext& ctx) {
  const InvariantBlock& v = cfg.invariant;
  const std::uint64_t seed = command_seed(cfg.seed, "invariant");
  const ModelSpec model = checked_model(cfg);
  for (double m : v.cycles.moment_exponents) {
    if (!admissible_m_interval(model, cfg.validation).contains(m)) {
      throw InvalidParams(
          fmt::format("moment exponent m = {} outside the admissible window", m));
    }
  }
  const SimConfig sim = sim_for(cfg, seed);
  const StationaryDensity density(model);

  say(ctx, "invariant: {} chains x {} cycles, alpha1={} alpha2={}", v.chains,
      v.cycles_per_chain, v.cycles.alpha1, v.cycles.alpha2);
  const CycleRun cycles = run_cycle_chains(model, v.cycles, v.chains,
                                           v.cycles_per_chain, sim,
                                           RunOptions{ctx.workers});
  const ChainEstimate chain = estimate_chain(cycles.records);
  const EmpiricalMeasure mu = khasminskii_measure(cycles.records, chain);
  const std::vector<double> ref = bin_masses(density, mu.edges);

  Artifacts out(cfg);
  CsvTable measure({"bin_lo", "bin_hi", "weight", "analytic_weight"});
  for (std::size_t b = 0; b < mu.bins(); ++b) {
    measure.row(mu.edges[b], mu.edges[b + 1], mu.weights[b], ref[b]);
  }
  out.table("measure.csv", measure);

  CsvTable ct({"n_low_low", "n_low_high", "n_high_low", "n_high_high", "nu_low",
               "nu_high"});
  ct.row(chain.counts[0][0], chain.counts[0][1], chain.counts[1][0],
         chain.counts[1][1], chain.nu[0], chain.nu[1]);
  out.table("chain.csv", ct);

  CsvTable mt({"m", "estimate", "std_error", "ci95_upper", "stationary_value"});
  for (double m : v.cycles.moment_exponents) {
    const MomentEstimate est = moment_I(cycles, chain, m, model);
    const double exact = stationary_moment(density, m);
    mt.row(m, est.mean, est.std_error, est.ci95_upper, exact);
    say(ctx, "  I({}) = {} +- {} (stationary law: {})", m, est.mean,
        est.std_error, exact);
  }
  out.table("moments.csv", mt);

  say(ctx, "  binned TV to the stationary law: {:.4g}; chain symmetric: {}; "
      "discarded cycles: {}",
      binned_tv(mu.weights, ref), symmetric_within_ci(chain), cycles.aborted);
  out.flush();
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_converge(const ExperimentConfig& cfg, const RunContext& ctx) {
  const ConvergeBlock& c = cfg.converge;
  const std::uint64_t seed = command_seed(cfg.seed, "converge");
  const ModelSpec model = checked_model(cfg);
  const BoundParams params =
      make_bound_params(model, c.m, c.c, c.alpha, cfg.validation);
  const StationaryDensity density(model);
  const std::vector<double> masses = reference_masses(density, c.bins);
  const RunOptions run{ctx.workers};
  SimConfig sim = sim_for(cfg, seed);
  sim.t_max = std::max(sim.t_max, c.times.back());

  const PiecewiseSampler mu_sampler = PiecewiseSampler::from_density(density);
  const InitialLaw init = c.x0 ? InitialLaw::at(*c.x0)
                               : InitialLaw::from(mu_sampler);
  say(ctx, "converge: {} replicas from {}", c.replicas,
      c.x0 ? fmt::format("x0 = {}", *c.x0) : std::string("the stationary law"));
  const MarginalSamples samples =
      sample_marginals(model, init, c.times, c.replicas, sim, run);

  Thm2Report report;
  if (c.x0) {
    report = thm2_from_samples(samples, masses, params, *c.x0, c.resamples,
                               derive_stream(seed, 1));
  } else {
    report.curve = tv_curve(samples, masses);
    report.rhs.assign(c.times.size(), kNaN);
    report.slope = {kNaN, kNaN, kNaN};
    report.pass = true;
  }

  MeetingTail tail;
  tail.survival.assign(c.times.size(), kNaN);
  const bool coupled = c.pairs > 0 && c.x0.has_value();
  if (coupled) {
    SimConfig ps = sim;
    ps.seed = derive_stream(seed, 2);
    say(ctx, "converge: {} coupled pairs", c.pairs);
    tail = meeting_tail(model, *c.x0, mu_sampler, c.pairs, c.times, ps, run,
                        c.resamples);
  }

  Artifacts out(cfg);
  CsvTable curve({"t", "tv_binned", "ci", "rhs_bound", "survival", "two_survival"});
  for (std::size_t k = 0; k < c.times.size(); ++k) {
    const double s = tail.survival[k];
    curve.row(c.times[k], report.curve.tv_binned[k], report.curve.ci[k],
              report.rhs[k], s, 2.0 * s);
    say(ctx, "  t={:<6g} tv={:<10.4g} ci={:<10.4g} rhs={:<10.4g} 2P(L>t)={:.4g}",
        c.times[k], report.curve.tv_binned[k], report.curve.ci[k], report.rhs[k],
        2.0 * s);
  }
  out.table("curve.csv", curve);

  CsvTable fit({"slope", "slope_lo", "slope_hi", "lambda_hat", "lambda_lo",
                "lambda_hi", "D_hat", "fit_lo", "fit_hi", "residual", "valid",
                "censored_frac", "coupling_consistent", "note"});
  const bool consistent = coupled && coupling_consistent(report.curve, tail);
  fit.row(report.slope.slope, report.slope.ci_lo, report.slope.ci_hi,
          coupled ? tail.fit.lambda_hat : kNaN, coupled ? tail.fit.lambda_lo : kNaN,
          coupled ? tail.fit.lambda_hi : kNaN, coupled ? tail.fit.D_hat : kNaN,
          coupled ? tail.fit.fit_lo : kNaN, coupled ? tail.fit.fit_hi : kNaN,
          coupled ? tail.fit.residual : kNaN, coupled && tail.fit.valid,
          coupled ? tail.censored_fraction : kNaN, consistent,
          coupled ? tail.fit.note : std::string("coupling not run"));
  out.table("tail_fit.csv", fit);

  if (ctx.svg) {
    std::vector<Series> series;
    series.push_back({"binned TV", "#1f77b4", c.times, report.curve.tv_binned});
    std::vector<double> upper(c.times.size());
    for (std::size_t k = 0; k < upper.size(); ++k) {
      upper[k] = report.curve.tv_binned[k] + report.curve.ci[k];
    }
    series.push_back({"TV + CI", "#1f77b4", c.times, upper, true});
    if (c.x0) series.push_back({"bound", "#d62728", c.times, report.rhs});
    if (coupled) {
      std::vector<double> two(c.times.size());
      for (std::size_t k = 0; k < two.size(); ++k) two[k] = 2.0 * tail.survival[k];
      series.push_back({"2 P(L > t)", "#2ca02c", c.times, two});
    }
    out.text("curve.svg", render_svg_chart("Distance to the stationary law",
                                           "t", series, out.provenance()));
  }

  say(ctx, "  log-TV slope {:.4g} [{:.4g}, {:.4g}]; bound respected: {}",
      report.slope.slope, report.slope.ci_lo, report.slope.ci_hi, report.pass);
  out.flush();
  return report.pass ? kExitOk : kExitInvalid;
}

// ---------------------------------------------------------------------------

namespace {

int worse(int a, int b) {
  auto rank = [](int s) {
    switch (s) {
      case kExitIo: return 3;
      case kExitInvalid: return 2;
      case kExitInconclusive: return 1;
      default: return 0;
    }
  };
  return rank(b) > rank(a) ? b : a;
}

}  // namespace

int cmd_all(const ExperimentConfig& cfg, const RunContext& ctx) {
  const int v = run_command("validate", cfg, ctx);
  if (v != kExitOk) return v;
  int status = kExitOk;
  for (const char* name : {"hitting", "invariant", "converge"}) {
    status = worse(status, run_command(name, cfg, ctx));
    if (status == kExitIo) break;
  }
  return status;
}

int run_command(std::string_view name, const ExperimentConfig& cfg,
                const RunContext& ctx) {
  auto report = [&](const char* kind, const std::exception& e) {
    say(ctx, "wfdiff {}: {}: {}", name, kind, e.what());
  };
  try {
    if (name == "validate") return cmd_validate(cfg, ctx);
    if (name == "hitting") return cmd_hitting(cfg, ctx);
    if (name == "invariant") return cmd_invariant(cfg, ctx);
    if (name == "converge") return cmd_converge(cfg, ctx);
    if (name == "all") return cmd_all(cfg, ctx);
    say(ctx, "wfdiff: unknown command '{}'", name);
    return kExitInvalid;
  } catch (const ConfigIoError& e) {
    report("I/O error", e);
    return kExitIo;
  } catch (const InvalidModel& e) {
    report("invalid model", e);
    return kExitInvalid;
  } catch (const InvalidParams& e) {
    report("invalid parameters", e);
    return kExitInvalid;
  } catch (const ExprError& e) {
    report("invalid expression", e);
    return kExitInvalid;
  } catch (const QuadratureError& e) {
    report("stationary density", e);
    return kExitInvalid;
  } catch (const EstimationError& e) {
    report("estimation failed", e);
    return kExitInconclusive;
  } catch (const Error& e) {
    report("error", e);
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    report("invalid argument", e);
    return kExitInvalid;
  }
}

int run_from_file(std::string_view name, const std::string& config_path,
                  const RunContext& ctx,
                  const std::optional<std::uint64_t>& seed_override,
                  const std::optional<std::string>& out_override) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigIoError& e) {
    say(ctx, "wfdiff: {}", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    say(ctx, "wfdiff: invalid configuration: {}", e.what());
    return kExitInvalid;
  }
  if (seed_override) cfg.seed = *seed_override;
  if (out_override) cfg.out_dir = *out_override;
  return run_command(name, cfg, ctx);
}

}  // namespace wfdiff::cli
