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

#include "wfdiff/sde.hpp"

#include <fmt/format.h>

namespace wfdiff {

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidParams(fmt::format("dt = {} must be positive", dt));
  }
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) {
    throw InvalidParams(fmt::format("t_max = {} must be nonnegative", t_max));
  }
  if (max_halvings < 0 || max_halvings > 60) {
    throw InvalidParams("max_halvings must be in [0, 60]");
  }
  if (record_stride < 1) throw InvalidParams("record_stride must be >= 1");
  if (!(guard >= 0.0 && guard < 0.5)) {
    throw InvalidParams("guard must be in [0, 1/2)");
  }
  if (!(meet_tol >= 0.0)) throw InvalidParams("meet_tol must be >= 0");
}

BoundaryBreach::BoundaryBreach(double t, double x, double h)
    : Error(fmt::format("boundary breach at t={} from x={} (step shrank to {})",
                        t, x, h)),
      t_(t),
      x_(x) {}

const char* hitting_kind_name(HittingKind kind) {
  switch (kind) {
    case HittingKind::kTAlpha:
      return "T_alpha";
    case HittingKind::kTAlphaPrime:
      return "T_alpha_prime";
    case HittingKind::kTHat:
      return "T_hat";
    case HittingKind::kT1:
      return "T1";
    case HittingKind::kT2:
      return "T2";
    case HittingKind::kTwoSidedExit:
      return "two_sided_exit";
  }
  return "unknown";
}

StoppingRule StoppingRule::reach_above(double alpha) {
  return {Type::kReachAbove, alpha, 1.0, HittingKind::kTAlpha};
}

StoppingRule StoppingRule::reach_below(double alpha) {
  return {Type::kReachBelow, 0.0, 1.0 - alpha, HittingKind::kTAlphaPrime};
}

StoppingRule StoppingRule::enter_central(double alpha) {
  return {Type::kEnterCentral, alpha, 1.0 - alpha, HittingKind::kTHat};
}

StoppingRule StoppingRule::exit_interval(double lo, double hi) {
  return {Type::kExitInterval, lo, hi, HittingKind::kTwoSidedExit};
}

void require_interior(double x, const char* what) {
  if (!(x > 0.0 && x < 1.0)) {
    throw InvalidParams(fmt::format("{} = {} must lie in (0, 1)", what, x));
  }
}

Path simulate_path(const ModelSpec& model, double x0, const SimConfig& cfg,
                   std::uint64_t stream) {
  cfg.validate();
  require_interior(x0, "x0");
  Rng rng(cfg.seed, stream);
  Path path;
  path.times.push_back(0.0);
  path.states.push_back(x0);
  double t = 0.0;
  double x = x0;
  std::size_t accepted = 0;
  bool last_recorded = true;
  const double eps_t = 1e-9 * cfg.dt;
  while (cfg.t_max - t > eps_t) {
    const Step s = guarded_step(model, x, std::min(cfg.dt, cfg.t_max - t),
                                cfg, rng, t);
    x = s.x;
    t += s.h;
    last_recorded = (++accepted % cfg.record_stride) == 0;
    if (last_recorded) {
      path.times.push_back(t);
      path.states.push_back(x);
    }
  }
  if (!last_recorded) {
    path.times.push_back(t);
    path.states.push_back(x);
  }
  return path;
}

HittingSample first_hitting(const ModelSpec& model, double x0,
                            const StoppingRule& rule, const SimConfig& cfg,
                            std::uint64_t stream) {
  cfg.validate();
  require_interior(x0, "x0");
  Rng rng(cfg.seed, stream);
  return run_until(model, x0, rule, cfg, rng);
}

std::vector<double> states_at(const ModelSpec& model, double x0,
                              std::span<const double> times,
                              const SimConfig& cfg, Rng& rng) {
  std::vector<double> out;
  out.reserve(times.size());
  double t = 0.0;
  double x = x0;
  for (double target : times) {
    const double eps_t = 1e-9 * cfg.dt;
    while (target - t > eps_t) {
      const Step s =
          guarded_step(model, x, std::min(cfg.dt, target - t), cfg, rng, t);
      x = s.x;
      t += s.h;
    }
    t = std::max(t, target);
    out.push_back(x);
  }
  return out;
}

CouplingSample simulate_pair_to_meeting(const ModelSpec& model, double x0,
                                        const InitialSampler& y_init,
                                        const SimConfig& cfg,
                                        std::uint64_t stream) {
  cfg.validate();
  require_interior(x0, "x0");
  Rng rx(cfg.seed, stream, 0);
  Rng ry(cfg.seed, stream, 1);
  Rng r0(cfg.seed, stream, 2);
  CouplingSample out;
  out.x0 = x0;
  out.y0 = y_init(r0);
  require_interior(out.y0, "y0");

  double x = x0;
  double y = out.y0;
  double d_prev = x - y;
  if (d_prev == 0.0 || std::abs(d_prev) <= cfg.meet_tol) return out;

  const double lo = cfg.guard;
  const double hi = 1.0 - cfg.guard;
  const double eps_t = 1e-9 * cfg.dt;
  double t = 0.0;
  while (cfg.t_max - t > eps_t) {
    double h = std::min(cfg.dt, cfg.t_max - t);
    bool accepted = false;
    double px = x;
    double py = y;
    for (int k = 0; k <= cfg.max_halvings; ++k) {
      px = em_step(model, x, h, rx.normal());
      py = em_step(model, y, h, ry.normal());
      if (px > lo && px < hi && py > lo && py < hi) {
        accepted = true;
        break;
      }
      h *= 0.5;
    }
    if (!accepted) throw BoundaryBreach(t, (px > lo && px < hi) ? y : x, h * 2.0);
    x = px;
    y = py;
    t += h;
    const double d = x - y;
    if (d == 0.0 || std::abs(d) <= cfg.meet_tol || ((d > 0.0) != (d_prev > 0.0))) {
      out.L = t;
      return out;
    }
    d_prev = d;
  }
  out.L = cfg.t_max;
  out.censored = true;
  return out;
}

}  // namespace wfdiff
