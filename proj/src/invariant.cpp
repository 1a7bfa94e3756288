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

#include "wfdiff/invariant.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fmt/format.h>

#include "wfdiff/parallel.hpp"

namespace wfdiff {
namespace {

std::size_t index_of(ChainState s) { return static_cast<std::size_t>(s); }

// Ratio estimator sum_s nu_s mean_s(a) / sum_s nu_s mean_s(d) with its
// delta-method standard error.
struct Ratio {
  double value = 0.0;
  double std_error = 0.0;
};

template <class NumFn>
Ratio weighted_ratio(std::span<const CycleRecord> records,
                     const ChainEstimate& chain, NumFn numerator) {
  std::array<double, 2> sum_a{};
  std::array<double, 2> sum_d{};
  std::array<std::size_t, 2> n{};
  for (const auto& r : records) {
    const std::size_t s = index_of(r.start);
    sum_a[s] += numerator(r);
    sum_d[s] += r.duration();
    ++n[s];
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t s = 0; s < 2; ++s) {
    if (chain.nu[s] == 0.0) continue;
    if (n[s] == 0) {
      throw EstimationError("no cycles start from a state with nu > 0");
    }
    num += chain.nu[s] * sum_a[s] / static_cast<double>(n[s]);
    den += chain.nu[s] * sum_d[s] / static_cast<double>(n[s]);
  }
  if (!(den > 0.0)) throw EstimationError("zero total cycle duration");
  Ratio out;
  out.value = num / den;
  std::array<double, 2> ss{};
  std::array<double, 2> mean_res{};
  for (const auto& r : records) {
    const std::size_t s = index_of(r.start);
    mean_res[s] += numerator(r) - out.value * r.duration();
  }
  for (std::size_t s = 0; s < 2; ++s) {
    if (n[s] > 0) mean_res[s] /= static_cast<double>(n[s]);
  }
  for (const auto& r : records) {
    const std::size_t s = index_of(r.start);
    const double e = numerator(r) - out.value * r.duration() - mean_res[s];
    ss[s] += e * e;
  }
  double var = 0.0;
  for (std::size_t s = 0; s < 2; ++s) {
    if (n[s] < 2 || chain.nu[s] == 0.0) continue;
    const double ns = static_cast<double>(n[s]);
    var += chain.nu[s] * chain.nu[s] * (ss[s] / (ns - 1.0)) / ns;
  }
  out.std_error = std::sqrt(var) / den;
  return out;
}

}  // namespace

CycleConfig::CycleConfig(double a1, double a2, std::size_t n_bins,
                         std::vector<double> exponents)
    : alpha1(a1), alpha2(a2), bins(n_bins),
      moment_exponents(std::move(exponents)) {
  validate();
}

void CycleConfig::validate() const {
  if (!(alpha1 > 0.0 && alpha1 < alpha2 && alpha2 < 0.5)) {
    throw InvalidParams(fmt::format(
        "cycle thresholds must satisfy 0 < alpha1 < alpha2 < 1/2 (got {}, {})",
        alpha1, alpha2));
  }
  if (bins == 0) throw InvalidParams("bins must be positive");
  for (double m : moment_exponents) {
    if (!(m > 0.0)) throw InvalidParams("moment exponents must be positive");
  }
}

double state_value(ChainState s, const CycleConfig& cyc) {
  return s == ChainState::kLow ? cyc.alpha1 : 1.0 - cyc.alpha1;
}

CycleRun run_cycles(const ModelSpec& model, const CycleConfig& cyc,
                    std::size_t n_cycles, const SimConfig& cfg,
                    std::uint64_t stream) {
  cyc.validate();
  cfg.validate();
  const double certified = max_certified_threshold(model);
  if (!(cyc.alpha2 <= certified)) {
    throw InvalidParams(fmt::format(
        "alpha2 = {} exceeds the largest certified hitting threshold {}",
        cyc.alpha2, certified));
  }

  CycleRun out;
  out.config = cyc;
  out.records.reserve(n_cycles);
  Rng rng(cfg.seed, stream);
  const StoppingRule enter =
      StoppingRule::enter_central(cyc.alpha2).labelled(HittingKind::kT1);
  const StoppingRule leave =
      StoppingRule::exit_interval(cyc.alpha1, 1.0 - cyc.alpha1)
          .labelled(HittingKind::kT2);
  const std::size_t k = cyc.moment_exponents.size();

  ChainState state = ChainState::kLow;
  double x = cyc.alpha1;
  while (out.records.size() < n_cycles) {
    CycleRecord rec;
    rec.start = state;
    rec.occupation.assign(cyc.bins, 0.0);
    rec.singular.assign(k, 0.0);
    auto accrue = [&](double xl, double h) {
      rec.occupation[bin_of(xl, cyc.bins)] += h;
      for (std::size_t j = 0; j < k; ++j) {
        rec.singular[j] += lyapunov_g(xl, cyc.moment_exponents[j]) * h;
      }
    };
    const HittingSample s1 = run_until(model, x, enter, cfg, rng, accrue);
    HittingSample s2{};
    if (!s1.censored) s2 = run_until(model, s1.exit_state, leave, cfg, rng, accrue);
    if (s1.censored || s2.censored) {
      if (++out.aborted > n_cycles) {
        throw EstimationError(fmt::format(
            "{} cycles censored at t_max = {}; increase t_max", out.aborted,
            cfg.t_max));
      }
      x = state_value(state, cyc);
      continue;
    }
    for (double g : rec.singular) {
      if (!std::isfinite(g)) {
        throw EstimationError("singular moment integrand overflow");
      }
    }
    rec.t1 = s1.value;
    rec.t2_minus_t1 = s2.value;
    rec.end = s2.exit_state <= cyc.alpha1 ? ChainState::kLow : ChainState::kHigh;
    state = rec.end;
    x = s2.exit_state;
    out.records.push_back(std::move(rec));
  }
  return out;
}

CycleRun run_cycle_chains(const ModelSpec& model, const CycleConfig& cyc,
                          std::size_t n_chains, std::size_t cycles_per_chain,
                          const SimConfig& cfg, const RunOptions& run) {
  if (n_chains == 0) throw InvalidParams("need at least one chain");
  std::vector<CycleRun> chains(n_chains);
  // One chain per task: chains are long and few, so no chunking.
  parallel_for(n_chains, run.workers, [&](std::size_t j) {
    chains[j] = run_cycles(model, cyc, cycles_per_chain, cfg, j);
  });
  CycleRun out;
  out.config = cyc;
  for (auto& c : chains) {
    out.aborted += c.aborted;
    for (auto& r : c.records) out.records.push_back(std::move(r));
  }
  return out;
}

ChainEstimate chain_from_counts(const Counts2& counts) {
  ChainEstimate e;
  e.counts = counts;
  for (std::size_t i = 0; i < 2; ++i) {
    const std::size_t row = counts[i][0] + counts[i][1];
    if (row == 0) {
      throw EstimationError(fmt::format(
          "chain state {} never visited; run more cycles",
          i == 0 ? "alpha1" : "1-alpha1"));
    }
    for (std::size_t j = 0; j < 2; ++j) {
      e.transition[i][j] =
          static_cast<double>(counts[i][j]) / static_cast<double>(row);
    }
  }
  const double p12 = e.transition[0][1];
  const double p21 = e.transition[1][0];
  if (p12 + p21 > 0.0) {
    e.nu = {p21 / (p12 + p21), p12 / (p12 + p21)};
  } else {
    // Both states absorbing; any mixture is stationary.
    e.nu = {0.5, 0.5};
  }
  e.all_positive = counts[0][0] > 0 && counts[0][1] > 0 && counts[1][0] > 0 &&
                   counts[1][1] > 0;
  return e;
}

ChainEstimate estimate_chain(std::span<const CycleRecord> records) {
  if (records.empty()) throw EstimationError("no cycle records");
  Counts2 counts{};
  for (const auto& r : records) ++counts[index_of(r.start)][index_of(r.end)];
  return chain_from_counts(counts);
}

bool symmetric_within_ci(const ChainEstimate& chain, double z) {
  const double n0 = static_cast<double>(chain.counts[0][0] + chain.counts[0][1]);
  const double n1 = static_cast<double>(chain.counts[1][0] + chain.counts[1][1]);
  const double p0 = chain.transition[0][0];
  const double p1 = chain.transition[1][1];
  const double se = std::sqrt(p0 * (1.0 - p0) / n0 + p1 * (1.0 - p1) / n1);
  return std::abs(p0 - p1) <= z * se;
}

EmpiricalMeasure khasminskii_measure(std::span<const CycleRecord> records,
                                     const ChainEstimate& chain) {
  if (records.empty()) throw EstimationError("no cycle records");
  const std::size_t bins = records.front().occupation.size();
  EmpiricalMeasure m;
  m.edges = uniform_edges(bins);
  m.weights.resize(bins);
  m.std_error.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const Ratio r = weighted_ratio(
        records, chain, [b](const CycleRecord& rec) { return rec.occupation[b]; });
    m.weights[b] = r.value;
    m.std_error[b] = r.std_error;
  }
  // The ratios already share one denominator; renormalize away rounding.
  double total = 0.0;
  for (double w : m.weights) total += w;
  if (!(total > 0.0)) throw EstimationError("zero total occupation");
  for (std::size_t b = 0; b < bins; ++b) {
    m.weights[b] /= total;
    m.std_error[b] /= total;
  }
  return m;
}

double stationary_moment(const StationaryDensity& density, double m) {
  boost::math::quadrature::tanh_sinh<double> ts;
  // The complement argument keeps 1 - x exact near the right end.
  auto f = [&](double x, double xc) {
    const double y = x > 0.5 ? 1.0 - xc : x;
    return (std::pow(y, -m) + std::pow(x > 0.5 ? xc : 1.0 - x, -m)) *
           density(y);
  };
  return ts.integrate(f, 0.0, 1.0, 1e-10);
}

MomentEstimate moment_I(const CycleRun& cycles, const ChainEstimate& chain,
                        double m, const ModelSpec& model) {
  const OpenInterval window = admissible_m_interval(model);
  if (!window.contains(m)) {
    throw InvalidParams(fmt::format(
        "m = {} outside the admissible window ({}, {})", m, window.lo,
        window.hi));
  }
  const auto& ex = cycles.config.moment_exponents;
  const auto it = std::find(ex.begin(), ex.end(), m);
  if (it == ex.end()) {
    throw InvalidParams(
        fmt::format("m = {} was not recorded along the cycles", m));
  }
  const std::size_t j = static_cast<std::size_t>(it - ex.begin());
  if (cycles.records.empty()) throw EstimationError("no cycle records");
  const Ratio r = weighted_ratio(
      cycles.records, chain,
      [j](const CycleRecord& rec) { return rec.singular[j]; });
  MomentEstimate e;
  e.mean = r.value;
  e.std_error = r.std_error;
  e.n = cycles.records.size();
  e.ci95_upper = r.value + kZ95 * r.std_error;
  return e;
}

EmpiricalMeasure time_average_measure(const ModelSpec& model, double x0,
                                      double burn_in, double horizon,
                                      std::size_t bins, std::size_t batches,
                                      const SimConfig& cfg,
                                      std::uint64_t stream) {
  cfg.validate();
  require_interior(x0, "x0");
  if (!(horizon > 0.0) || !(burn_in >= 0.0) || batches < 2) {
    throw InvalidParams("time average needs horizon > 0 and >= 2 batches");
  }
  Rng rng(cfg.seed, stream);
  double x = x0;
  double t = 0.0;
  while (burn_in - t > 1e-9 * cfg.dt) {
    const Step s = guarded_step(model, x, std::min(cfg.dt, burn_in - t), cfg, rng, t);
    x = s.x;
    t += s.h;
  }
  const double span = horizon / static_cast<double>(batches);
  std::vector<std::vector<double>> per_batch(batches, std::vector<double>(bins, 0.0));
  for (std::size_t k = 0; k < batches; ++k) {
    double tb = 0.0;
    while (span - tb > 1e-9 * cfg.dt) {
      const Step s = guarded_step(model, x, std::min(cfg.dt, span - tb), cfg, rng, t);
      per_batch[k][bin_of(x, bins)] += s.h;
      x = s.x;
      tb += s.h;
      t += s.h;
    }
    for (double& v : per_batch[k]) v /= tb;
  }
  EmpiricalMeasure m;
  m.edges = uniform_edges(bins);
  m.weights.assign(bins, 0.0);
  m.std_error.assign(bins, 0.0);
  const double nb = static_cast<double>(batches);
  for (std::size_t b = 0; b < bins; ++b) {
    double mean = 0.0;
    for (std::size_t k = 0; k < batches; ++k) mean += per_batch[k][b];
    mean /= nb;
    double ss = 0.0;
    for (std::size_t k = 0; k < batches; ++k) {
      ss += (per_batch[k][b] - mean) * (per_batch[k][b] - mean);
    }
    m.weights[b] = mean;
    m.std_error[b] = std::sqrt(ss / (nb - 1.0) / nb);
  }
  return m;
}

}  // namespace wfdiff
