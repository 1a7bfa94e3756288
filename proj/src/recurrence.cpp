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

#include "wfdiff/recurrence.hpp"

#include <cmath>

#include <fmt/format.h>

#include "wfdiff/parallel.hpp"

namespace wfdiff {
namespace {

double singular_integrand(double x, double m, Side side) {
  switch (side) {
    case Side::kLower:
      return std::pow(x, -m - 1.0);
    case Side::kUpper:
      return std::pow(1.0 - x, -m - 1.0);
    case Side::kBoth:
      return std::pow(x, -m - 1.0) + std::pow(1.0 - x, -m - 1.0);
  }
  return 0.0;
}

BoundCheckReport exponential_moment_check(const std::string& name,
                                          const ModelSpec& model, double x0,
                                          const BoundParams& params,
                                          const StoppingRule& rule, double rhs,
                                          std::size_t n, const SimConfig& cfg,
                                          const RunOptions& run) {
  const HittingRun hr = sample_hitting(model, x0, rule, n, cfg, run);
  std::vector<double> values(n);
  std::size_t censored = 0;
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = std::exp(params.c * hr.samples[i].value);
    censored += hr.samples[i].censored ? 1 : 0;
  }
  BoundCheckReport r;
  r.check = name;
  r.lhs = summarize(values, censored);
  r.rhs = rhs;
  r.params = params;
  r.x0 = x0;
  r.verdict = decide(r.lhs, rhs);
  return r;
}

void require_n(std::size_t n) {
  if (n == 0) throw InvalidParams("replica count must be positive");
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

Verdict decide(const MomentEstimate& lhs, double rhs) {
  if (lhs.censored_fraction > 0.0) return Verdict::kInconclusive;
  return lhs.ci95_upper <= rhs ? Verdict::kPass : Verdict::kFail;
}

double prop1_rhs(const BoundParams& p, double x0) {
  return p.C_lower * p.c * std::pow(p.alpha, p.m + 1.0) * std::pow(x0, -p.m) +
         1.0;
}

double prop2_rhs(const BoundParams& p, double x0) {
  return p.C_upper * p.c * std::pow(p.alpha, p.m + 1.0) *
             std::pow(1.0 - x0, -p.m) +
         1.0;
}

double thm1_rhs(const BoundParams& p, double x0) {
  return p.C_max * p.c * std::pow(p.alpha, p.m + 1.0) *
             (std::pow(1.0 - x0, -p.m) + std::pow(x0, -p.m)) +
         1.0;
}

double occupation_rhs(const BoundParams& p, double x0, Side side) {
  switch (side) {
    case Side::kLower:
      return p.C_lower * std::pow(x0, -p.m);
    case Side::kUpper:
      return p.C_upper * std::pow(1.0 - x0, -p.m);
    case Side::kBoth:
      return p.C_max * (std::pow(x0, -p.m) + std::pow(1.0 - x0, -p.m));
  }
  return 0.0;
}

void require_feasible(const ModelSpec& model, const BoundParams& p) {
  const BoundParams ref = make_bound_params(model, p.m, p.c, p.alpha);
  auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
  };
  if (!close(ref.C_lower, p.C_lower) || !close(ref.C_upper, p.C_upper) ||
      !close(ref.C_max, p.C_max)) {
    throw InvalidParams("bound constants do not match the model");
  }
}

HittingRun sample_hitting(const ModelSpec& model, double x0,
                          const StoppingRule& rule, std::size_t n,
                          const SimConfig& cfg, const RunOptions& run,
                          double m, Side side) {
  cfg.validate();
  require_interior(x0, "x0");
  HittingRun out;
  out.samples.resize(n);
  const bool integrate = m > 0.0;
  if (integrate) out.integrals.resize(n);
  parallel_for(n, run.workers, [&](std::size_t i) {
    Rng rng(cfg.seed, i);
    if (!integrate) {
      out.samples[i] = run_until(model, x0, rule, cfg, rng);
      return;
    }
    double acc = 0.0;
    out.samples[i] = run_until(model, x0, rule, cfg, rng,
                               [&](double x, double h) {
                                 acc += singular_integrand(x, m, side) * h;
                               });
    if (!std::isfinite(acc)) {
      throw EstimationError(
          fmt::format("occupation integrand overflow on replica {}", i));
    }
    out.integrals[i] = acc;
  });
  return out;
}

BoundCheckReport check_prop1(const ModelSpec& model, double x0,
                             const BoundParams& params, std::size_t n,
                             const SimConfig& cfg, const RunOptions& run) {
  require_feasible(model, params);
  require_n(n);
  if (!(x0 > 0.0 && x0 <= params.alpha)) {
    throw InvalidParams(
        fmt::format("x0 = {} must lie in (0, alpha = {}]", x0, params.alpha));
  }
  return exponential_moment_check("prop1", model, x0, params,
                                  StoppingRule::reach_above(params.alpha),
                                  prop1_rhs(params, x0), n, cfg, run);
}

BoundCheckReport check_prop2(const ModelSpec& model, double x0,
                             const BoundParams& params, std::size_t n,
                             const SimConfig& cfg, const RunOptions& run) {
  require_feasible(model, params);
  require_n(n);
  if (!(x0 >= 1.0 - params.alpha && x0 < 1.0)) {
    throw InvalidParams(fmt::format("x0 = {} must lie in [1 - alpha = {}, 1)",
                                    x0, 1.0 - params.alpha));
  }
  return exponential_moment_check("prop2", model, x0, params,
                                  StoppingRule::reach_below(params.alpha),
                                  prop2_rhs(params, x0), n, cfg, run);
}

BoundCheckReport check_thm1(const ModelSpec& model, double x0,
                            const BoundParams& params, std::size_t n,
                            const SimConfig& cfg, const RunOptions& run) {
  require_feasible(model, params);
  require_n(n);
  require_interior(x0, "x0");
  return exponential_moment_check("thm1", model, x0, params,
                                  StoppingRule::enter_central(params.alpha),
                                  thm1_rhs(params, x0), n, cfg, run);
}

BoundCheckReport check_occupation_bound(const ModelSpec& model, double x0,
                                        const BoundParams& params,
                                        std::size_t n, const SimConfig& cfg,
                                        Side side, const RunOptions& run) {
  require_feasible(model, params);
  require_n(n);
  require_interior(x0, "x0");
  StoppingRule rule = StoppingRule::enter_central(params.alpha);
  std::string name = "occupation_both";
  if (side == Side::kLower) {
    if (x0 > params.alpha) {
      throw InvalidParams("lower occupation bound needs x0 <= alpha");
    }
    rule = StoppingRule::reach_above(params.alpha);
    name = "occupation_lower";
  } else if (side == Side::kUpper) {
    if (x0 < 1.0 - params.alpha) {
      throw InvalidParams("upper occupation bound needs x0 >= 1 - alpha");
    }
    rule = StoppingRule::reach_below(params.alpha);
    name = "occupation_upper";
  }
  const HittingRun hr =
      sample_hitting(model, x0, rule, n, cfg, run, params.m, side);
  std::size_t censored = 0;
  for (const auto& s : hr.samples) censored += s.censored ? 1 : 0;
  BoundCheckReport r;
  r.check = name;
  r.lhs = summarize(hr.integrals, censored);
  r.rhs = occupation_rhs(params, x0, side);
  r.params = params;
  r.x0 = x0;
  r.verdict = decide(r.lhs, r.rhs);
  return r;
}

std::vector<ExitRow> lemma1_exit_experiment(const ModelSpec& model, double x0,
                                            const std::vector<double>& lowers,
                                            double upper, std::size_t n,
                                            const SimConfig& cfg,
                                            const RunOptions& run) {
  cfg.validate();
  require_n(n);
  for (std::size_t k = 0; k < lowers.size(); ++k) {
    if (!(lowers[k] > 0.0 && lowers[k] <= x0 && x0 < upper)) {
      throw InvalidParams(fmt::format(
          "need 0 < lower = {} <= x0 = {} < upper = {}", lowers[k], x0, upper));
    }
    if (k > 0 && !(lowers[k] < lowers[k - 1])) {
      throw InvalidParams("lower ends must be strictly decreasing");
    }
  }
  std::vector<ExitRow> rows;
  for (double a : lowers) {
    const StoppingRule rule = StoppingRule::exit_interval(a, upper);
    std::vector<HittingSample> samples(n);
    parallel_for(n, run.workers, [&](std::size_t i) {
      Rng rng(cfg.seed, i);
      samples[i] = run_until(model, x0, rule, cfg, rng);
    });
    std::size_t low = 0;
    std::size_t censored = 0;
    for (const auto& s : samples) {
      if (s.censored) {
        ++censored;
      } else if (s.exit_state <= a) {
        ++low;
      }
    }
    rows.push_back({a, wilson(low, n - censored), censored});
  }
  return rows;
}

bool strictly_decreasing(const std::vector<ExitRow>& rows) {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (!(rows[k].lower_exit.hi < rows[k - 1].lower_exit.lo)) return false;
  }
  return true;
}

double largest_certified_rate(const ModelSpec& model, double x0, double m,
                              double alpha, std::size_t n,
                              const SimConfig& cfg, double c_hi,
                              const RunOptions& run) {
  require_n(n);
  if (!(c_hi > 0.0)) throw InvalidParams("c_hi must be positive");
  if (!(x0 > 0.0 && x0 <= alpha)) {
    throw InvalidParams("x0 must lie in (0, alpha]");
  }
  const HittingRun hr =
      sample_hitting(model, x0, StoppingRule::reach_above(alpha), n, cfg, run);
  std::size_t censored = 0;
  for (const auto& s : hr.samples) censored += s.censored ? 1 : 0;
  if (censored > 0) return 0.0;
  std::vector<double> values(n);
  auto certified = [&](double c) {
    BoundParams p;
    try {
      p = make_bound_params(model, m, c, alpha);
    } catch (const InvalidParams&) {
      return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
      values[i] = std::exp(c * hr.samples[i].value);
    }
    return summarize(values).ci95_upper <= prop1_rhs(p, x0);
  };
  if (certified(c_hi)) return c_hi;
  double lo = 0.0;
  double hi = c_hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (certified(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace wfdiff
