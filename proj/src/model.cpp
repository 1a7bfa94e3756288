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

#include "wfdiff/model.hpp"

#include "wfdiff/expr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

namespace wfdiff {
namespace {

constexpr double kRelTol = 1e-12;

// Evaluates a coefficient, mapping exceptions and non-finite results to
// nullopt so validation can report the location.
std::optional<double> try_eval(const Coefficient& fn, double x) {
  try {
    const double v = fn(x);
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::vector<double> uniform_grid(std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

std::vector<double> beta_candidates() {
  std::vector<double> out;
  for (int k = 1; k <= 25; ++k) out.push_back(k / 100.0);
  return out;
}

ConditionCheck check_parameters(const ModelSpec& m) {
  ConditionCheck c{Condition::kParameters, false, std::nullopt, {}};
  std::vector<std::string> bad;
  if (!m.drift || !m.sigma) bad.push_back("drift/sigma missing");
  if (!(m.epsilon > 0.0)) bad.push_back("epsilon must be > 0");
  if (!(m.mu_bound > 0.0)) bad.push_back("mu_bound must be > 0");
  if (!(m.beta0 > 0.0 && m.beta0 < 0.5)) bad.push_back("beta0 not in (0, 1/2)");
  if (!(m.beta1 > 0.0 && m.beta1 < 0.5)) bad.push_back("beta1 not in (0, 1/2)");
  if (!(m.b0 > 0.0)) bad.push_back("b0 must be > 0");
  if (!(m.b1 < 0.0)) bad.push_back("b1 must be < 0");
  c.passed = bad.empty();
  for (std::size_t i = 0; i < bad.size(); ++i) {
    c.detail += (i ? "; " : "") + bad[i];
  }
  return c;
}

ConditionCheck check_drift_side(const ModelSpec& m,
                                const std::vector<double>& grid, bool lower) {
  ConditionCheck c{lower ? Condition::kLowerDrift : Condition::kUpperDrift,
                   false, std::nullopt, {}};
  const double bound = lower ? m.b0 : m.b1;
  const double tol = kRelTol * std::max(1.0, std::abs(bound));
  std::vector<double> xs;
  if (lower) {
    for (double x : grid) {
      if (x < m.beta0) xs.push_back(x);
    }
    xs.push_back(std::nextafter(m.beta0, 0.0));
  } else {
    const double edge = 1.0 - m.beta1;
    xs.push_back(std::nextafter(edge, 1.0));
    for (double x : grid) {
      if (x > edge) xs.push_back(x);
    }
  }
  for (double x : xs) {
    const auto v = try_eval(m.drift, x);
    if (!v) {
      c.witness = x;
      c.detail = fmt::format("drift not evaluable at x={}", x);
      return c;
    }
    const bool ok = lower ? (*v >= bound - tol) : (*v <= bound + tol);
    if (!ok) {
      c.witness = x;
      c.detail = fmt::format("drift({}) = {} {} {}", x, *v, lower ? "<" : ">",
                             bound);
      return c;
    }
  }
  c.passed = true;
  return c;
}

std::vector<double> sigma_points(const std::vector<double>& grid) {
  std::vector<double> xs;
  for (double d : {1e-9, 1e-6, 1e-3}) xs.push_back(d);
  for (double x : grid) {
    if (x > 0.0 && x < 1.0) xs.push_back(x);
  }
  for (double d : {1e-3, 1e-6, 1e-9}) xs.push_back(1.0 - d);
  return xs;
}

ConditionCheck check_sigma_envelope(const ModelSpec& m,
                                    const std::vector<double>& xs) {
  ConditionCheck c{Condition::kSigmaEnvelope, false, std::nullopt, {}};
  for (double x : xs) {
    const auto s = try_eval(m.sigma, x);
    if (!s) {
      c.witness = x;
      c.detail = fmt::format("sigma not evaluable at x={}", x);
      return c;
    }
    const double s2 = *s * *s;
    const double cap = m.mu_bound * x * (1.0 - x);
    if (!(s2 > 0.0)) {
      c.witness = x;
      c.detail = fmt::format("sigma^2({}) = {} is not positive", x, s2);
      return c;
    }
    if (s2 > cap * (1.0 + kRelTol)) {
      c.witness = x;
      c.detail = fmt::format("sigma^2({}) = {} > mu_bound*x*(1-x) = {}", x,
                             s2, cap);
      return c;
    }
  }
  c.passed = true;
  return c;
}

ConditionCheck check_nondegenerate(const ModelSpec& m,
                                   const std::vector<double>& grid,
                                   const std::vector<double>& thresholds) {
  ConditionCheck c{Condition::kSigmaNondegenerate, false, std::nullopt, {}};
  std::ostringstream detail;
  for (double x0 : thresholds) {
    double inf = std::numeric_limits<double>::infinity();
    double argmin = x0;
    for (double x : grid) {
      if (x < x0 || x > 1.0 - x0) continue;
      const auto s = try_eval(m.sigma, x);
      const double s2 = s ? *s * *s : std::numeric_limits<double>::quiet_NaN();
      if (!(s2 >= inf)) {
        inf = s2;
        argmin = x;
      }
      if (std::isnan(s2)) break;
    }
    if (!(inf > 0.0)) {
      c.witness = argmin;
      c.detail = fmt::format("inf sigma^2 on [{}, {}] is {} (at x={})", x0,
                             1.0 - x0, inf, argmin);
      return c;
    }
    detail << (detail.tellp() > 0 ? "; " : "") << "x0=" << x0 << ": " << inf;
  }
  c.passed = true;
  c.detail = detail.str();
  return c;
}

ConditionCheck check_margin(const ModelSpec& m, bool lower) {
  ConditionCheck c{lower ? Condition::kLowerNonattainability
                         : Condition::kUpperNonattainability,
                   false, std::nullopt, {}};
  const double margin = lower ? m.lower_margin() : m.upper_margin();
  c.passed = margin > 0.0;
  c.detail = lower ? fmt::format("2*b0/(eps^2*mu_bound) - 1 = {}", margin)
                   : fmt::format("2*b1/(eps^2*mu_bound) + 1 = {}", -margin);
  return c;
}

void require_valid(const ModelSpec& model, const ValidationOptions& opts) {
  const ValidationReport report = validate_envelope(model, opts);
  if (!report.passed()) {
    throw InvalidModel("invalid model: " + report.summary());
  }
}

}  // namespace

double ModelSpec::lower_margin() const {
  return 2.0 * b0 / (epsilon * epsilon * mu_bound) - 1.0;
}

double ModelSpec::upper_margin() const {
  return -2.0 * b1 / (epsilon * epsilon * mu_bound) - 1.0;
}

const char* condition_name(Condition c) {
  switch (c) {
    case Condition::kParameters:
      return "parameters";
    case Condition::kLowerDrift:
      return "lower_drift";
    case Condition::kUpperDrift:
      return "upper_drift";
    case Condition::kSigmaEnvelope:
      return "sigma_envelope";
    case Condition::kSigmaNondegenerate:
      return "sigma_nondegenerate";
    case Condition::kLowerNonattainability:
      return "lower_nonattainability";
    case Condition::kUpperNonattainability:
      return "upper_nonattainability";
  }
  return "unknown";
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ConditionCheck& c) { return c.passed; });
}

std::vector<Condition> ValidationReport::failed() const {
  std::vector<Condition> out;
  for (const auto& c : checks) {
    if (!c.passed) out.push_back(c.condition);
  }
  return out;
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& c : checks) {
    if (c.passed) continue;
    if (!out.empty()) out += "; ";
    out += condition_name(c.condition);
    if (!c.detail.empty()) out += " (" + c.detail + ")";
  }
  return out.empty() ? "all conditions hold" : out;
}

ValidationReport validate_envelope(const ModelSpec& model,
                                   const ValidationOptions& opts) {
  if (opts.grid_points < 16) {
    throw std::invalid_argument("grid_points must be at least 16");
  }
  ValidationReport report;
  report.checks.push_back(check_parameters(model));
  if (!model.drift || !model.sigma) {
    for (Condition c :
         {Condition::kLowerDrift, Condition::kUpperDrift,
          Condition::kSigmaEnvelope, Condition::kSigmaNondegenerate}) {
      report.checks.push_back({c, false, std::nullopt, "coefficient missing"});
    }
  } else {
    const auto grid = uniform_grid(opts.grid_points);
    report.checks.push_back(check_drift_side(model, grid, true));
    report.checks.push_back(check_drift_side(model, grid, false));
    report.checks.push_back(check_sigma_envelope(model, sigma_points(grid)));
    report.checks.push_back(
        check_nondegenerate(model, grid, opts.nondegeneracy_thresholds));
  }
  report.checks.push_back(check_margin(model, true));
  report.checks.push_back(check_margin(model, false));
  return report;
}

OpenInterval admissible_m_interval(const ModelSpec& model,
                                   const ValidationOptions& opts) {
  require_valid(model, opts);
  const double scale = model.epsilon * model.epsilon * model.mu_bound;
  return {0.0, std::min(2.0 * model.b0, -2.0 * model.b1) / scale - 1.0};
}

BoundParams make_bound_params(const ModelSpec& model, double m, double c,
                              std::optional<double> alpha,
                              const ValidationOptions& opts) {
  const OpenInterval window = admissible_m_interval(model, opts);
  if (!window.contains(m)) {
    throw InvalidParams(fmt::format(
        "m = {} outside the admissible window ({}, {})", m, window.lo,
        window.hi));
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvalidParams(fmt::format("rate c = {} must be positive", c));
  }
  const double k = 0.5 * model.epsilon * model.epsilon * m * (m + 1.0) *
                   model.mu_bound;
  const double gap_lo = m * model.b0 - k;
  const double gap_hi = -m * model.b1 - k;

  BoundParams p;
  p.m = m;
  p.c = c;
  p.C_lower = 2.0 / gap_lo;
  p.C_upper = 2.0 / gap_hi;
  p.C_max = std::max(p.C_lower, p.C_upper);

  double amax = std::min(model.beta0, model.beta1);
  if (c > k) {
    amax = std::min({amax, gap_lo / (2.0 * (c - k)), gap_hi / (2.0 * (c - k))});
  }
  if (!(amax > 0.0) || !(gap_lo > 0.0) || !(gap_hi > 0.0)) {
    throw InvalidParams("no feasible threshold for this (m,c)");
  }
  p.alpha_max = amax;
  if (alpha) {
    if (!(*alpha > 0.0 && *alpha <= amax)) {
      throw InvalidParams(fmt::format(
          "alpha = {} not in the feasible range (0, {}] for m = {}, c = {}",
          *alpha, amax, m, c));
    }
    p.alpha = *alpha;
  } else {
    p.alpha = amax;
  }
  return p;
}

ModelSpec derive_envelope(const ModelSpec& model, double beta0, double beta1,
                          std::size_t grid_points) {
  ModelSpec out = model;
  out.beta0 = beta0;
  out.beta1 = beta1;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  auto visit_lo = [&](double x) {
    const auto v = try_eval(model.drift, x);
    lo = v ? std::min(lo, *v) : std::numeric_limits<double>::quiet_NaN();
  };
  auto visit_hi = [&](double x) {
    const auto v = try_eval(model.drift, x);
    hi = v ? std::max(hi, *v) : std::numeric_limits<double>::quiet_NaN();
  };
  for (double x : uniform_grid(grid_points)) {
    if (x < beta0) visit_lo(x);
    if (x > 1.0 - beta1) visit_hi(x);
  }
  visit_lo(std::nextafter(beta0, 0.0));
  visit_hi(std::nextafter(1.0 - beta1, 1.0));
  out.b0 = lo;
  out.b1 = hi;
  return out;
}

double max_certified_threshold(const ModelSpec& model,
                               const ValidationOptions& opts) {
  double best = 0.0;
  if (model.drift && model.sigma && validate_envelope(model, opts).passed()) {
    best = std::min(model.beta0, model.beta1);
  }
  if (!model.drift || !model.sigma) return best;
  double beta_lo = 0.0;
  double beta_hi = 0.0;
  for (double beta : beta_candidates()) {
    const ModelSpec d = derive_envelope(model, beta, beta, opts.grid_points);
    if (d.b0 > 0.0 && d.lower_margin() > 0.0) beta_lo = beta;
    if (d.b1 < 0.0 && d.upper_margin() > 0.0) beta_hi = beta;
  }
  if (beta_lo > 0.0 && beta_hi > 0.0) {
    const ModelSpec d =
        derive_envelope(model, beta_lo, beta_hi, opts.grid_points);
    if (validate_envelope(d, opts).passed()) {
      best = std::max(best, std::min(beta_lo, beta_hi));
    }
  }
  return best;
}

ModelSpec wf_mutation_with_envelope(double theta1, double theta2,
                                    double epsilon, double beta0,
                                    double beta1) {
  if (!(theta1 > 0.0) || !(theta2 > 0.0)) {
    throw InvalidModel("wf_mutation requires theta1 > 0 and theta2 > 0");
  }
  ModelSpec m;
  m.drift = [theta1, theta2](double x) {
    return theta1 * (1.0 - x) - theta2 * x;
  };
  m.sigma = [](double x) { return std::sqrt(x * (1.0 - x)); };
  m.epsilon = epsilon;
  m.mu_bound = 1.0;
  m.beta0 = beta0;
  m.beta1 = beta1;
  // Affine drift: inf on [0, beta0) and sup on (1 - beta1, 1] are the
  // limits at the open ends.
  m.b0 = theta1 - (theta1 + theta2) * beta0;
  m.b1 = -theta2 + (theta1 + theta2) * beta1;
  m.label = fmt::format("wf_mutation(theta1={}, theta2={}, epsilon={})",
                        theta1, theta2, epsilon);
  return m;
}

ModelSpec wf_mutation_max_window(double theta1, double theta2,
                                 double epsilon) {
  if (!(theta1 > 0.0) || !(theta2 > 0.0)) {
    throw InvalidModel("wf_mutation requires theta1 > 0 and theta2 > 0");
  }
  if (!(epsilon > 0.0)) throw InvalidModel("epsilon must be > 0");
  const double e2 = epsilon * epsilon;
  double best_lo = -std::numeric_limits<double>::infinity();
  double best_hi = best_lo;
  double beta0 = 0.0;
  double beta1 = 0.0;
  for (double beta : beta_candidates()) {
    const double score_lo = 2.0 * (theta1 - (theta1 + theta2) * beta) / e2 - 1.0;
    const double score_hi =
        -2.0 * (-theta2 + (theta1 + theta2) * beta) / e2 - 1.0;
    if (score_lo > best_lo) {
      best_lo = score_lo;
      beta0 = beta;
    }
    if (score_hi > best_hi) {
      best_hi = score_hi;
      beta1 = beta;
    }
  }
  return wf_mutation_with_envelope(theta1, theta2, epsilon, beta0, beta1);
}

ModelSpec builtin_wf_mutation(double theta1, double theta2, double epsilon) {
  ModelSpec m = wf_mutation_max_window(theta1, theta2, epsilon);
  const ValidationReport report = validate_envelope(m);
  if (!report.passed()) {
    throw InvalidModel(m.label + " has no valid envelope: " + report.summary());
  }
  return m;
}

ModelSpec custom_model(const std::string& drift_expr,
                       const std::string& sigma_expr, double epsilon,
                       double mu_bound, double beta0, double b0, double beta1,
                       double b1) {
  const Expression drift = Expression::parse(drift_expr);
  const Expression sigma = Expression::parse(sigma_expr);
  ModelSpec m;
  m.drift = drift;
  m.sigma = sigma;
  m.epsilon = epsilon;
  m.mu_bound = mu_bound;
  m.beta0 = beta0;
  m.b0 = b0;
  m.beta1 = beta1;
  m.b1 = b1;
  m.label = "custom(B = " + drift_expr + ", sigma = " + sigma_expr + ")";
  return m;
}

// ---------------------------------------------------------------------------
// Stationary density

namespace {

// Logit coordinates z = ln(y / (1 - y)). The Jacobian y (1 - y) is formed
// from the rounded y so that it matches what sigma(y) sees near the ends.
struct LogitPoint {
  double y;
  double jac;
};

LogitPoint from_logit(double z) {
  const double y = z < 0.0 ? std::exp(z) / (1.0 + std::exp(z))
                           : 1.0 / (1.0 + std::exp(-z));
  return {y, y * (1.0 - y)};
}

double to_logit(double y) { return std::log(y) - std::log1p(-y); }

struct Piece {
  double value;
  double err;
  double l1;
};

// Adaptive bisection against an absolute target tol * max(L1, scale), so
// pieces whose integral is near zero do not chase roundoff.
template <class F>
Piece adapt(F& f, double a, double b, double target, int depth) {
  using boost::math::quadrature::gauss_kronrod;
  Piece p{};
  p.value = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &p.err,
                                                 &p.l1);
  if (p.err <= target || depth == 0) return p;
  const double mid = 0.5 * (a + b);
  const Piece l = adapt(f, a, mid, 0.5 * target, depth - 1);
  const Piece r = adapt(f, mid, b, 0.5 * target, depth - 1);
  return {l.value + r.value, l.err + r.err, l.l1 + r.l1};
}

template <class F>
Piece integrate_piece(F f, double a, double b, double tol, double scale) {
  using boost::math::quadrature::gauss_kronrod;
  if (a == b) return {0.0, 0.0, 0.0};
  Piece first{};
  first.value = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0,
                                                     &first.err, &first.l1);
  const double target = tol * std::max(first.l1, scale);
  if (first.err <= target) return first;
  return adapt(f, a, b, target, 12);
}

// `scale` sets the absolute floor: 1 for log-scale integrals, the
// normalizer for probability masses.
void check_quadrature(const Piece& p, double max_error, double scale,
                      const char* what) {
  const double rel = p.err / std::max(p.l1, scale);
  if (!std::isfinite(p.value) || !std::isfinite(p.err) || rel > max_error) {
    throw QuadratureError(
        fmt::format("{}: quadrature did not converge (relative error {})",
                    what, rel),
        rel);
  }
}

}  // namespace

StationaryDensity::StationaryDensity(ModelSpec model, QuadratureOptions opts)
    : model_(std::move(model)), opts_(opts) {
  if (!model_.drift || !model_.sigma) {
    throw InvalidModel("stationary density needs drift and sigma");
  }
  if (!(opts_.delta > 0.0 && opts_.delta < 0.5) || !(opts_.cell_width > 0.0)) {
    throw std::invalid_argument("invalid quadrature options");
  }
  z_hi_ = to_logit(1.0 - opts_.delta);
  z_lo_ = -z_hi_;
  // Nodes are symmetric about 0 so that x = 1/2 is a node.
  const auto half = static_cast<std::size_t>(std::ceil(z_hi_ / opts_.cell_width));
  const std::size_t n = 2 * half + 1;
  nodes_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double off = (static_cast<double>(k) - static_cast<double>(half)) *
                       opts_.cell_width;
    nodes_[k] = std::clamp(off, z_lo_, z_hi_);
  }
  nodes_[half] = 0.0;

  const double e2 = model_.epsilon * model_.epsilon;
  auto scale_integrand = [&](double z) {
    const LogitPoint p = from_logit(z);
    const double s = model_.sigma(p.y);
    return 2.0 * model_.drift(p.y) / (e2 * s * s) * p.jac;
  };
  phi_.assign(n, 0.0);
  for (std::size_t k = half + 1; k < n; ++k) {
    const Piece p =
        integrate_piece(scale_integrand, nodes_[k - 1], nodes_[k], opts_.tolerance, 1.0);
    check_quadrature(p, opts_.max_error, 1.0, "scale integral");
    phi_[k] = phi_[k - 1] + p.value;
  }
  for (std::size_t k = half; k-- > 0;) {
    const Piece p =
        integrate_piece(scale_integrand, nodes_[k + 1], nodes_[k], opts_.tolerance, 1.0);
    check_quadrature(p, opts_.max_error, 1.0, "scale integral");
    phi_[k] = phi_[k + 1] + p.value;
  }

  // Masses are accumulated unnormalized with normalizer_ == 1, then scaled.
  normalizer_ = 1.0;
  cum_.assign(n, 0.0);
  shift_ = *std::max_element(phi_.begin(), phi_.end());
  for (std::size_t k = 1; k < n; ++k) {
    auto g = [&](double z) { return unnormalized_at(z); };
    const Piece p = integrate_piece(g, nodes_[k - 1], nodes_[k], opts_.tolerance,
                                    cum_[k - 1]);
    check_quadrature(p, opts_.max_error, cum_[k - 1] + p.value, "density integral");
    cum_[k] = cum_[k - 1] + p.value;
  }
  normalizer_ = cum_.back();
  if (!(normalizer_ > 0.0) || !std::isfinite(normalizer_)) {
    throw QuadratureError("stationary density is not normalizable",
                          normalizer_);
  }
  for (double& c : cum_) c /= normalizer_;
}

std::size_t StationaryDensity::cell_of(double z) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), z);
  if (it == nodes_.begin()) return 0;
  return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

double StationaryDensity::phi_at(double z) const {
  const std::size_t k = cell_of(z);
  const double e2 = model_.epsilon * model_.epsilon;
  auto f = [&](double u) {
    const LogitPoint p = from_logit(u);
    const double s = model_.sigma(p.y);
    return 2.0 * model_.drift(p.y) / (e2 * s * s) * p.jac;
  };
  const Piece p = integrate_piece(f, nodes_[k], z, opts_.tolerance, 1.0);
  check_quadrature(p, opts_.max_error, 1.0, "scale integral");
  return phi_[k] + p.value;
}

// Density in z coordinates: p(y) dy / dz, unnormalized when normalizer_ == 1.
double StationaryDensity::unnormalized_at(double z) const {
  const LogitPoint p = from_logit(z);
  const double s = model_.sigma(p.y);
  return std::exp(phi_at(z) - shift_) / (model_.epsilon * model_.epsilon * s * s) *
         p.jac / normalizer_;
}

double StationaryDensity::cumulative_at(double z) const {
  z = std::clamp(z, z_lo_, z_hi_);
  const std::size_t k = cell_of(z);
  auto g = [&](double u) { return unnormalized_at(u); };
  const Piece p = integrate_piece(g, nodes_[k], z, opts_.tolerance, 1.0);
  check_quadrature(p, opts_.max_error, 1.0, "density integral");
  return cum_[k] + p.value;
}

double StationaryDensity::operator()(double x) const {
  if (!(x > 0.0 && x < 1.0)) return 0.0;
  const double z = to_logit(x);
  const double s = model_.sigma(x);
  return std::exp(phi_at(z) - shift_) / (model_.epsilon * model_.epsilon * s * s) /
         normalizer_;
}

double StationaryDensity::cdf(double x) const {
  if (!(x > opts_.delta)) return 0.0;
  if (!(x < 1.0 - opts_.delta)) return 1.0;
  return cumulative_at(to_logit(x));
}

double StationaryDensity::mass(double a, double b) const {
  if (!(b > a)) return 0.0;
  return std::max(0.0, cdf(b) - cdf(a));
}

double analytic_stationary_density(const ModelSpec& model, double x,
                                   const QuadratureOptions& opts) {
  return StationaryDensity(model, opts)(x);
}

}  // namespace wfdiff
