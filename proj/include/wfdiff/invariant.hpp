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

#ifndef WFDIFF_INVARIANT_HPP
#define WFDIFF_INVARIANT_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wfdiff/measure.hpp"
#include "wfdiff/model.hpp"
#include "wfdiff/recurrence.hpp"
#include "wfdiff/sde.hpp"
#include "wfdiff/stats.hpp"

namespace wfdiff {

// Nested thresholds of the cycle construction, 0 < alpha1 < alpha2 < 1/2.
// A cycle starts on {alpha1, 1 - alpha1}, runs until it enters
// [alpha2, 1 - alpha2] (T1), then until it leaves (alpha1, 1 - alpha1) (T2).
struct CycleConfig {
  double alpha1 = 0.1;
  double alpha2 = 0.2;
  std::size_t bins = 200;
  // Exponents m for which int g_m(X_t) dt is accumulated along every cycle,
  // g_m(x) = x^-m + (1-x)^-m.
  std::vector<double> moment_exponents = {0.5};

  CycleConfig() = default;
  CycleConfig(double a1, double a2, std::size_t n_bins = 200,
              std::vector<double> exponents = {0.5});

  void validate() const;
};

inline double lyapunov_g(double x, double m) {
  return std::pow(x, -m) + std::pow(1.0 - x, -m);
}

enum class ChainState { kLow = 0, kHigh = 1 };

// alpha1 or 1 - alpha1.
double state_value(ChainState s, const CycleConfig& cyc);

struct CycleRecord {
  double t1 = 0.0;
  double t2_minus_t1 = 0.0;
  std::vector<double> occupation;  // time spent per bin over the cycle
  std::vector<double> singular;    // int g_m dt, one per moment exponent
  ChainState start = ChainState::kLow;
  ChainState end = ChainState::kLow;

  double duration() const { return t1 + t2_minus_t1; }
};

struct CycleRun {
  CycleConfig config;
  std::vector<CycleRecord> records;
  std::size_t aborted = 0;  // cycles discarded for censoring at t_max
};

// One chain of n_cycles consecutive cycles from x = alpha1. A leg that
// reaches cfg.t_max is discarded and the cycle restarts from the exact
// chain state. Throws InvalidParams if alpha2 exceeds every threshold a
// valid envelope of the model certifies.
CycleRun run_cycles(const ModelSpec& model, const CycleConfig& cyc,
                    std::size_t n_cycles, const SimConfig& cfg,
                    std::uint64_t stream);

// n_chains independent chains on streams 0..n_chains-1, concatenated in
// chain order.
CycleRun run_cycle_chains(const ModelSpec& model, const CycleConfig& cyc,
                          std::size_t n_chains, std::size_t cycles_per_chain,
                          const SimConfig& cfg, const RunOptions& run = {});

using Matrix2 = std::array<std::array<double, 2>, 2>;
using Counts2 = std::array<std::array<std::size_t, 2>, 2>;

struct ChainEstimate {
  Counts2 counts{};
  Matrix2 transition{};
  std::array<double, 2> nu{};
  bool all_positive = false;
};

ChainEstimate chain_from_counts(const Counts2& counts);
ChainEstimate estimate_chain(std::span<const CycleRecord> records);

// p(low -> low) and p(high -> high) agree within z standard errors.
bool symmetric_within_ci(const ChainEstimate& chain, double z = kZ95);

// nu-weighted mean occupation per start state, normalized by the
// nu-weighted mean cycle duration. Per-bin standard errors by the delta
// method (cycles are independent given their start state).
EmpiricalMeasure khasminskii_measure(std::span<const CycleRecord> records,
                                     const ChainEstimate& chain);

// int g_m dmu for the analytic stationary law, by double-exponential
// quadrature on (0, 1). Used as the reference column in reports.
double stationary_moment(const StationaryDensity& density, double m);

// Time average of g_m under the cycle measure, from the per-cycle path
// integrals. m must be one of the recorded exponents and admissible for
// `model`.
MomentEstimate moment_I(const CycleRun& cycles, const ChainEstimate& chain,
                        double m, const ModelSpec& model);

// Occupation histogram of one long trajectory after a burn-in, with
// batch-means standard errors per bin.
EmpiricalMeasure time_average_measure(const ModelSpec& model, double x0,
                                      double burn_in, double horizon,
                                      std::size_t bins, std::size_t batches,
                                      const SimConfig& cfg,
                                      std::uint64_t stream);

}  // namespace wfdiff

#endif  // WFDIFF_INVARIANT_HPP
