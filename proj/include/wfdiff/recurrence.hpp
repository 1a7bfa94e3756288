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

#ifndef WFDIFF_RECURRENCE_HPP
#define WFDIFF_RECURRENCE_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "wfdiff/model.hpp"
#include "wfdiff/sde.hpp"
#include "wfdiff/stats.hpp"

namespace wfdiff {

struct RunOptions {
  unsigned workers = 1;
};

enum class Verdict { kPass, kFail, kInconclusive };

const char* verdict_name(Verdict v);

// pass iff ci95_upper <= rhs with no censoring; any censoring makes an
// upper-bound certification inconclusive because censored e^{cT} values
// understate the mean.
Verdict decide(const MomentEstimate& lhs, double rhs);

struct BoundCheckReport {
  std::string check;
  MomentEstimate lhs;
  double rhs = 0.0;
  BoundParams params;
  double x0 = 0.0;
  Verdict verdict = Verdict::kInconclusive;
};

enum class Side { kLower, kUpper, kBoth };

// C_lower c alpha^{m+1} x^-m + 1
double prop1_rhs(const BoundParams& p, double x0);
// C_upper c alpha^{m+1} (1-x)^-m + 1
double prop2_rhs(const BoundParams& p, double x0);
// C_max c alpha^{m+1} (x^-m + (1-x)^-m) + 1
double thm1_rhs(const BoundParams& p, double x0);
// C x^-m, C (1-x)^-m, or C_max (x^-m + (1-x)^-m)
double occupation_rhs(const BoundParams& p, double x0, Side side);

// Checks that `p` is what make_bound_params produces for this model.
void require_feasible(const ModelSpec& model, const BoundParams& p);

// Replica i of every check runs on stream i, so checks sharing a SimConfig
// use common random numbers.
BoundCheckReport check_prop1(const ModelSpec& model, double x0,
                             const BoundParams& params, std::size_t n,
                             const SimConfig& cfg, const RunOptions& run = {});
BoundCheckReport check_prop2(const ModelSpec& model, double x0,
                             const BoundParams& params, std::size_t n,
                             const SimConfig& cfg, const RunOptions& run = {});
BoundCheckReport check_thm1(const ModelSpec& model, double x0,
                            const BoundParams& params, std::size_t n,
                            const SimConfig& cfg, const RunOptions& run = {});

// E int_0^tau f(X_s) ds with tau = T_alpha, T'_alpha or T-hat_alpha and
// f = x^{-m-1}, (1-x)^{-m-1} or their sum, by left-endpoint quadrature.
BoundCheckReport check_occupation_bound(const ModelSpec& model, double x0,
                                        const BoundParams& params,
                                        std::size_t n, const SimConfig& cfg,
                                        Side side, const RunOptions& run = {});

struct HittingRun {
  std::vector<HittingSample> samples;
  std::vector<double> integrals;  // empty unless an integrand was requested
};

// n replicas of `rule` from x0; if `m` is positive, also integrates the
// singular Lyapunov integrand for `side` along each path.
HittingRun sample_hitting(const ModelSpec& model, double x0,
                          const StoppingRule& rule, std::size_t n,
                          const SimConfig& cfg, const RunOptions& run,
                          double m = 0.0, Side side = Side::kBoth);

struct ExitRow {
  double lower = 0.0;
  Proportion lower_exit;  // over uncensored runs
  std::size_t censored = 0;
};

// For each lower end a (decreasing), the probability that the exit from
// (a, upper) happens at a. Uses common random numbers across rows. The
// model is not validated, so degenerate models can be probed.
std::vector<ExitRow> lemma1_exit_experiment(const ModelSpec& model, double x0,
                                            const std::vector<double>& lowers,
                                            double upper, std::size_t n,
                                            const SimConfig& cfg,
                                            const RunOptions& run = {});

// Each row's upper Wilson bound lies below the previous row's lower bound.
bool strictly_decreasing(const std::vector<ExitRow>& rows);

// Bisection for the largest c in (0, c_hi] for which the exponential-moment
// bound at fixed (m, alpha) is certified on one fixed set of T_alpha samples.
// Returns 0 if no c in the search range certifies.
double largest_certified_rate(const ModelSpec& model, double x0, double m,
                              double alpha, std::size_t n,
                              const SimConfig& cfg, double c_hi,
                              const RunOptions& run = {});

}  // namespace wfdiff

#endif  // WFDIFF_RECURRENCE_HPP
