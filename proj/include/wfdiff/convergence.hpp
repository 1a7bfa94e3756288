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

#ifndef WFDIFF_CONVERGENCE_HPP
#define WFDIFF_CONVERGENCE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wfdiff/measure.hpp"
#include "wfdiff/model.hpp"
#include "wfdiff/recurrence.hpp"
#include "wfdiff/sde.hpp"

namespace wfdiff {

// Law of X_0: a point mass or a sampler.
struct InitialLaw {
  std::optional<double> point;
  InitialSampler sampler;

  static InitialLaw at(double x0) { return {x0, {}}; }
  static InitialLaw from(InitialSampler s) { return {std::nullopt, std::move(s)}; }
  double draw(Rng& rng) const { return point ? *point : sampler(rng); }
};

// states[k][i] is replica i at times[k]; replica i uses stream i.
struct MarginalSamples {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::size_t replicas() const { return states.empty() ? 0 : states[0].size(); }
};

MarginalSamples sample_marginals(const ModelSpec& model,
                                 const InitialLaw& init,
                                 std::span<const double> times,
                                 std::size_t n_replicas, const SimConfig& cfg,
                                 const RunOptions& run = {});

struct TVCurve {
  std::vector<double> times;
  std::vector<double> tv_binned;
  std::vector<double> ci;  // 95% half-widths
};

// Distribution-free 95% half-width for binned TV from n draws over `bins`
// bins: |TV(p_hat, q) - TV(p, q)| <= TV(p_hat, p), with
// E TV(p_hat, p) <= sqrt((bins - 1) / n) / 2 and a bounded-differences
// deviation term sqrt(log(20) / (2 n)).
double tv_half_width(std::size_t bins, std::size_t n);

TVCurve tv_curve(const MarginalSamples& samples,
                 std::span<const double> masses);

// Analytic bin masses; throws InvalidParams if any bin has zero mass.
std::vector<double> reference_masses(const StationaryDensity& density,
                                     std::size_t bins);

TVCurve estimate_tv_curve(const ModelSpec& model, const InitialLaw& init,
                          std::span<const double> times,
                          std::size_t n_replicas, std::size_t bins,
                          const SimConfig& cfg, const RunOptions& run = {});

// 2 min{(C_max c alpha^{m+1} ((1-x)^-m + x^-m) + 2) e^{-ct}, 1}
double thm2_rhs(const BoundParams& params, double x0, double t);
// Last time at which thm2_rhs still equals 2.
double thm2_plateau_end(const BoundParams& params, double x0);
// C_max alpha^{m+1} ((1-x)^-m + x^-m) + 1, the prefactor of the
// meeting-time tail bound.
double paper_prefactor(const BoundParams& params, double x0);

struct SlopeFit {
  double slope = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// OLS slope of log TV against t, with a percentile bootstrap CI over
// replicas (whole paths are resampled).
SlopeFit log_tv_slope(const MarginalSamples& samples,
                      std::span<const double> masses, std::size_t resamples,
                      std::uint64_t seed);

struct Thm2Report {
  TVCurve curve;
  std::vector<double> rhs;
  SlopeFit slope;
  bool pass = false;  // tv + ci <= rhs at every time
};

Thm2Report check_thm2(const ModelSpec& model, double x0,
                      const BoundParams& params,
                      std::span<const double> times, std::size_t n_replicas,
                      std::size_t bins, const SimConfig& cfg,
                      const RunOptions& run = {},
                      std::size_t resamples = 200);

Thm2Report thm2_from_samples(const MarginalSamples& samples,
                             std::span<const double> masses,
                             const BoundParams& params, double x0,
                             std::size_t resamples, std::uint64_t seed);

// |tv_a - tv_b| <= ci_a + ci_b at time index k.
bool curves_agree(const TVCurve& a, const TVCurve& b, std::size_t k);

struct TailFit {
  double lambda_hat = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double D_hat = 0.0;
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  double residual = 0.0;
  bool valid = false;
  std::string note;
};

struct MeetingTail {
  std::vector<double> times;
  std::vector<double> survival;  // P(L > t)
  double censored_fraction = 0.0;
  TailFit fit;
  std::vector<double> meeting_times;  // per pair, t_max when censored
};

// Samples meeting times of X from x0 and Y from `y_law`, reports the
// survival at `times` and fits log P(L > t) = log D - lambda t on a
// uniform grid over the range where P(L > t) >= 10/n. More than 1%
// censoring invalidates the fit.
MeetingTail meeting_tail(const ModelSpec& model, double x0,
                         const InitialSampler& y_law, std::size_t n_pairs,
                         std::span<const double> times, const SimConfig& cfg,
                         const RunOptions& run = {},
                         std::size_t resamples = 200);

// 2 P(L > t) >= tv - ci at every time shared by both.
bool coupling_consistent(const TVCurve& curve, const MeetingTail& tail);

}  // namespace wfdiff

#endif  // WFDIFF_CONVERGENCE_HPP
