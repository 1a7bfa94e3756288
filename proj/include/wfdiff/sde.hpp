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

#ifndef WFDIFF_SDE_HPP
#define WFDIFF_SDE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wfdiff/error.hpp"
#include "wfdiff/model.hpp"
#include "wfdiff/rng.hpp"

namespace wfdiff {

struct SimConfig {
  double dt = 1e-4;
  double t_max = 10.0;
  int max_halvings = 24;
  std::uint64_t seed = 0;
  std::size_t record_stride = 1;
  // Proposals within `guard` of 0 or 1 are rejected and retried.
  double guard = 1e-12;
  // |X - Y| <= meet_tol counts as a meeting in paired runs.
  double meet_tol = 0.0;

  void validate() const;
};

// Step halving ran out before a proposal landed in (guard, 1 - guard).
// Signals a step size too coarse for the model, or an invalid model.
class BoundaryBreach : public Error {
 public:
  BoundaryBreach(double t, double x, double h);
  double time() const { return t_; }
  double state() const { return x_; }

 private:
  double t_;
  double x_;
};

inline double em_step(const ModelSpec& model, double x, double h, double z) {
  return x + model.drift(x) * h + model.epsilon * model.sigma(x) * std::sqrt(h) * z;
}

struct Step {
  double x;
  double h;
};

// Euler-Maruyama step of at most h; a proposal outside (guard, 1 - guard)
// is discarded and retried with h/2 and fresh noise, up to max_halvings
// times. `t` is only used for the breach report.
inline Step guarded_step(const ModelSpec& model, double x, double h,
                         const SimConfig& cfg, Rng& rng, double t) {
  const double lo = cfg.guard;
  const double hi = 1.0 - cfg.guard;
  for (int k = 0; k <= cfg.max_halvings; ++k) {
    const double y = em_step(model, x, h, rng.normal());
    if (y > lo && y < hi) return {y, h};
    h *= 0.5;
  }
  throw BoundaryBreach(t, x, h * 2.0);
}

struct Path {
  std::vector<double> times;
  std::vector<double> states;
};

enum class HittingKind { kTAlpha, kTAlphaPrime, kTHat, kT1, kT2, kTwoSidedExit };

const char* hitting_kind_name(HittingKind kind);

// Stopping rules evaluated on the discrete state after each accepted step.
struct StoppingRule {
  enum class Type { kReachAbove, kReachBelow, kEnterCentral, kExitInterval };

  Type type;
  double lo;
  double hi;
  HittingKind kind;

  // T_alpha: first time X >= alpha.
  static StoppingRule reach_above(double alpha);
  // T'_alpha: first time X <= 1 - alpha.
  static StoppingRule reach_below(double alpha);
  // T-hat_alpha: first time X enters [alpha, 1 - alpha].
  static StoppingRule enter_central(double alpha);
  // First exit from (lo, hi): X <= lo or X >= hi.
  static StoppingRule exit_interval(double lo, double hi);

  StoppingRule labelled(HittingKind k) const {
    StoppingRule r = *this;
    r.kind = k;
    return r;
  }

  bool fired(double x) const {
    switch (type) {
      case Type::kReachAbove:
        return x >= lo;
      case Type::kReachBelow:
        return x <= hi;
      case Type::kEnterCentral:
        return x >= lo && x <= hi;
      case Type::kExitInterval:
        return x <= lo || x >= hi;
    }
    return false;
  }
};

struct HittingSample {
  HittingKind kind;
  double value = 0.0;  // hitting time, or t_max when censored
  bool censored = false;
  double exit_state = 0.0;
};

// Runs from (t = 0, x0) until `rule` fires or t_max, calling
// observer(x_left, h) for every accepted step (left-endpoint quadrature).
template <class Observer>
HittingSample run_until(const ModelSpec& model, double x0,
                        const StoppingRule& rule, const SimConfig& cfg,
                        Rng& rng, Observer&& observer) {
  double x = x0;
  if (rule.fired(x)) return {rule.kind, 0.0, false, x};
  double t = 0.0;
  const double eps_t = 1e-9 * cfg.dt;
  while (cfg.t_max - t > eps_t) {
    const Step s = guarded_step(model, x, std::min(cfg.dt, cfg.t_max - t),
                                cfg, rng, t);
    observer(x, s.h);
    x = s.x;
    t += s.h;
    if (rule.fired(x)) return {rule.kind, t, false, x};
  }
  return {rule.kind, cfg.t_max, true, x};
}

inline HittingSample run_until(const ModelSpec& model, double x0,
                               const StoppingRule& rule, const SimConfig& cfg,
                               Rng& rng) {
  return run_until(model, x0, rule, cfg, rng, [](double, double) {});
}

void require_interior(double x, const char* what);

Path simulate_path(const ModelSpec& model, double x0, const SimConfig& cfg,
                   std::uint64_t stream);

HittingSample first_hitting(const ModelSpec& model, double x0,
                            const StoppingRule& rule, const SimConfig& cfg,
                            std::uint64_t stream);

// Advances one path and returns its state at each of the (increasing)
// `times`; steps are shortened so every requested time is hit exactly.
std::vector<double> states_at(const ModelSpec& model, double x0,
                              std::span<const double> times,
                              const SimConfig& cfg, Rng& rng);

using InitialSampler = std::function<double(Rng&)>;

struct CouplingSample {
  double L = 0.0;  // meeting time, or t_max when censored
  bool censored = false;
  double x0 = 0.0;
  double y0 = 0.0;
};

// Two independent copies on a shared time grid, X from x0 and Y from
// y_init (drawn on lane 2 of the stream). They meet at the first grid time
// where X - Y changes sign, vanishes, or drops within meet_tol.
CouplingSample simulate_pair_to_meeting(const ModelSpec& model, double x0,
                                        const InitialSampler& y_init,
                                        const SimConfig& cfg,
                                        std::uint64_t stream);

}  // namespace wfdiff

#endif  // WFDIFF_SDE_HPP
