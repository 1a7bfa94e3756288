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

#include "wfdiff/convergence.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "wfdiff/parallel.hpp"
#include "wfdiff/stats.hpp"

namespace wfdiff {
namespace {

void require_times(std::span<const double> times) {
  if (times.empty()) throw InvalidParams("need at least one time point");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] > 0.0) || (k > 0 && !(times[k] > times[k - 1]))) {
      throw InvalidParams("times must be positive and strictly increasing");
    }
  }
}

double ols_slope(std::span<const double> t, std::span<const double> tv,
                 double floor) {
  std::vector<double> y(tv.size());
  for (std::size_t k = 0; k < tv.size(); ++k) {
    y[k] = std::log(std::max(tv[k], floor));
  }
  return least_squares(t, y).slope;
}


LinearFit fit_log_survival(std::span<const double> sorted_L,
                           std::span<const double> grid, double floor) {
  const double n = static_cast<double>(sorted_L.size());
  std::vector<double> y(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto above = static_cast<double>(
        sorted_L.end() - std::upper_bound(sorted_L.begin(), sorted_L.end(), grid[j]));
    y[j] = std::log(std::max(above / n, floor));
  }
  return least_squares(grid, y);
}

}  // namespace

MarginalSamples sample_marginals(const ModelSpec& model,
                                 const InitialLaw& init,
                                 std::span<const double> times,
                                 std::size_t n_replicas, const SimConfig& cfg,
                                 const RunOptions& run) {
  cfg.validate();
  require_times(times);
  if (n_replicas == 0) throw InvalidParams("replica count must be positive");
  if (init.point) require_interior(*init.point, "x0");
  MarginalSamples out;
  out.times.assign(times.begin(), times.end());
  out.states.assign(times.size(), std::vector<double>(n_replicas));
  parallel_for(n_replicas, run.workers, [&](std::size_t i) {
    Rng noise(cfg.seed, i, 0);
    Rng start(cfg.seed, i, 1);
    const double x0 = init.draw(start);
    require_interior(x0, "x0");
    const std::vector<double> xs = states_at(model, x0, times, cfg, noise);
    for (std::size_t k = 0; k < xs.size(); ++k) out.states[k][i] = xs[k];
  });
  return out;
}

double tv_half_width(std::size_t bins, std::size_t n) {
  const double nn = static_cast<double>(n);
  return 0.5 * std::sqrt(static_cast<double>(bins - 1) / nn) +
         std::sqrt(std::log(20.0) / (2.0 * nn));
}

TVCurve tv_curve(const MarginalSamples& samples,
                 std::span<const double> masses) {
  TVCurve c;
  c.times = samples.times;
  const std::size_t n = samples.replicas();
  for (const auto& xs : samples.states) {
    const std::vector<double> h = histogram(xs, masses.size());
    c.tv_binned.push_back(binned_tv(h, masses));
    c.ci.push_back(tv_half_width(masses.size(), n));
  }
  return c;
}

std::vector<double> reference_masses(const StationaryDensity& density,
                                     std::size_t bins) {
  const std::vector<double> edges = uniform_edges(bins);
  std::vector<double> q = bin_masses(density, edges);
  for (std::size_t b = 0; b < q.size(); ++b) {
    if (!(q[b] > 0.0)) {
      throw InvalidParams(fmt::format(
          "bin [{}, {}] has zero stationary mass; use fewer bins", edges[b],
          edges[b + 1]));
    }
  }
  return q;
}

TVCurve estimate_tv_curve(const ModelSpec& model, const InitialLaw& init,
                          std::span<const double> times,
                          std::size_t n_replicas, std::size_t bins,
                          const SimConfig& cfg, const RunOptions& run) {
  const StationaryDensity density(model);
  const std::vector<double> q = reference_masses(density, bins);
  return tv_curve(sample_marginals(model, init, times, n_replicas, cfg, run), q);
}

double thm2_rhs(const BoundParams& p, double x0, double t) {
  const double bracket = p.C_max * p.c * std::pow(p.alpha, p.m + 1.0) *
                             (std::pow(1.0 - x0, -p.m) + std::pow(x0, -p.m)) +
                         2.0;
  return 2.0 * std::min(bracket * std::exp(-p.c * t), 1.0);
}

double thm2_plateau_end(const BoundParams& p, double x0) {
  const double bracket = p.C_max * p.c * std::pow(p.alpha, p.m + 1.0) *
                             (std::pow(1.0 - x0, -p.m) + std::pow(x0, -p.m)) +
                         2.0;
  return std::log(bracket) / p.c;
}

double paper_prefactor(const BoundParams& p, double x0) {
  return p.C_max * std::pow(p.alpha, p.m + 1.0) *
             (std::pow(1.0 - x0, -p.m) + std::pow(x0, -p.m)) +
         1.0;
}

SlopeFit log_tv_slope(const MarginalSamples& samples,
                      std::span<const double> masses, std::size_t resamples,
                      std::uint64_t seed) {
  if (samples.times.size() < 2) {
    throw InvalidParams("slope needs at least two time points");
  }
  const std::size_t n = samples.replicas();
  const std::size_t bins = masses.size();
  const double floor = 0.5 / static_cast<double>(n);
  SlopeFit fit;
  fit.slope = ols_slope(samples.times, tv_curve(samples, masses).tv_binned, floor);
  if (resamples == 0) {
    fit.ci_lo = fit.ci_hi = fit.slope;
    return fit;
  }
  Rng rng(seed, stream_id("log_tv_slope"));
  std::vector<double> slopes(resamples);
  std::vector<std::size_t> idx(n);
  std::vector<double> h(bins);
  std::vector<double> tv(samples.times.size());
  for (std::size_t b = 0; b < resamples; ++b) {
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
    for (std::size_t k = 0; k < samples.times.size(); ++k) {
      std::fill(h.begin(), h.end(), 0.0);
      for (std::size_t i : idx) h[bin_of(samples.states[k][i], bins)] += 1.0;
      for (double& v : h) v /= static_cast<double>(n);
      tv[k] = binned_tv(h, masses);
    }
    slopes[b] = ols_slope(samples.times, tv, floor);
  }
  std::sort(slopes.begin(), slopes.end());
  fit.ci_lo = quantile_sorted(slopes, 0.025);
  fit.ci_hi = quantile_sorted(slopes, 0.975);
  return fit;
}

Thm2Report thm2_from_samples(const MarginalSamples& samples,
                             std::span<const double> masses,
                             const BoundParams& params, double x0,
                             std::size_t resamples, std::uint64_t seed) {
  Thm2Report r;
  r.curve = tv_curve(samples, masses);
  r.pass = true;
  for (std::size_t k = 0; k < r.curve.times.size(); ++k) {
    r.rhs.push_back(thm2_rhs(params, x0, r.curve.times[k]));
    if (!(r.curve.tv_binned[k] + r.curve.ci[k] <= r.rhs.back())) r.pass = false;
  }
  if (samples.times.size() >= 2) {
    r.slope = log_tv_slope(samples, masses, resamples, seed);
  }
  return r;
}

Thm2Report check_thm2(const ModelSpec& model, double x0,
                      const BoundParams& params,
                      std::span<const double> times, std::size_t n_replicas,
                      std::size_t bins, const SimConfig& cfg,
                      const RunOptions& run, std::size_t resamples) {
  require_feasible(model, params);
  const StationaryDensity density(model);
  const std::vector<double> q = reference_masses(density, bins);
  const MarginalSamples s =
      sample_marginals(model, InitialLaw::at(x0), times, n_replicas, cfg, run);
  return thm2_from_samples(s, q, params, x0, resamples, cfg.seed);
}

bool curves_agree(const TVCurve& a, const TVCurve& b, std::size_t k) {
  return std::abs(a.tv_binned.at(k) - b.tv_binned.at(k)) <= a.ci.at(k) + b.ci.at(k);
}

MeetingTail meeting_tail(const ModelSpec& model, double x0,
                         const InitialSampler& y_law, std::size_t n_pairs,
                         std::span<const double> times, const SimConfig& cfg,
                         const RunOptions& run, std::size_t resamples) {
  cfg.validate();
  require_times(times);
  if (n_pairs < 10) throw InvalidParams("meeting_tail needs at least 10 pairs");
  MeetingTail out;
  out.times.assign(times.begin(), times.end());
  out.meeting_times.resize(n_pairs);
  std::vector<char> censored(n_pairs, 0);
  parallel_for(n_pairs, run.workers, [&](std::size_t i) {
    const CouplingSample s = simulate_pair_to_meeting(model, x0, y_law, cfg, i);
    out.meeting_times[i] = s.L;
    censored[i] = s.censored ? 1 : 0;
  });
  const double n = static_cast<double>(n_pairs);
  std::size_t n_censored = 0;
  for (char c : censored) n_censored += static_cast<std::size_t>(c);
  out.censored_fraction = static_cast<double>(n_censored) / n;

  std::vector<double> sorted = out.meeting_times;
  std::sort(sorted.begin(), sorted.end());
  for (double t : times) {
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
    out.survival.push_back(static_cast<double>(above) / n);
  }

  TailFit& fit = out.fit;
  if (out.censored_fraction > 0.01) {
    fit.note = fmt::format("censored fraction {} exceeds 1%", out.censored_fraction);
    return out;
  }
  // P(L > t) >= 10/n holds for t below the 10th largest meeting time.
  const double t_hi = std::min(sorted[n_pairs - 10], cfg.t_max);
  if (!(t_hi > 0.0)) {
    fit.note = "survival drops below 10/n immediately";
    return out;
  }
  constexpr std::size_t kGrid = 32;
  std::vector<double> grid(kGrid);
  for (std::size_t j = 0; j < kGrid; ++j) {
    grid[j] = t_hi * static_cast<double>(j) / static_cast<double>(kGrid);
  }
  const double floor = 0.5 / n;
  const LinearFit line = fit_log_survival(sorted, grid, floor);
  fit.lambda_hat = -line.slope;
  fit.D_hat = std::exp(line.intercept);
  fit.residual = line.residual_rms;
  fit.fit_lo = grid.front();
  fit.fit_hi = t_hi;
  fit.valid = true;
  fit.lambda_lo = fit.lambda_hi = fit.lambda_hat;
  if (resamples > 0) {
    Rng rng(cfg.seed, stream_id("meeting_tail_bootstrap"));
    std::vector<double> lambdas(resamples);
    std::vector<double> boot(n_pairs);
    for (std::size_t b = 0; b < resamples; ++b) {
      for (auto& v : boot) v = sorted[rng.below(n_pairs)];
      std::sort(boot.begin(), boot.end());
      lambdas[b] = -fit_log_survival(boot, grid, floor).slope;
    }
    std::sort(lambdas.begin(), lambdas.end());
    fit.lambda_lo = quantile_sorted(lambdas, 0.025);
    fit.lambda_hi = quantile_sorted(lambdas, 0.975);
  }
  return out;
}

bool coupling_consistent(const TVCurve& curve, const MeetingTail& tail) {
  for (std::size_t k = 0; k < curve.times.size(); ++k) {
    const auto it = std::find(tail.times.begin(), tail.times.end(), curve.times[k]);
    if (it == tail.times.end()) continue;
    const double s = tail.survival[static_cast<std::size_t>(it - tail.times.begin())];
    if (!(2.0 * s >= curve.tv_binned[k] - curve.ci[k])) return false;
  }
  return true;
}

}  // namespace wfdiff
