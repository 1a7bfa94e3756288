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

#ifndef WFDIFF_MODEL_HPP
#define WFDIFF_MODEL_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wfdiff/error.hpp"

namespace wfdiff {

using Coefficient = std::function<double(double)>;

// dX = drift(X) dt + epsilon * sigma(X) dW on (0, 1), together with the
// envelope constants certifying the boundary conditions:
//   drift >= b0 on [0, beta0),  drift <= b1 on (1 - beta1, 1],
//   0 < sigma^2 <= mu_bound * x * (1 - x).
// `mu_bound` is the diffusion envelope, not the invariant measure.
struct ModelSpec {
  Coefficient drift;
  Coefficient sigma;
  double epsilon = 1.0;
  double mu_bound = 1.0;
  double beta0 = 0.0;
  double b0 = 0.0;
  double beta1 = 0.0;
  double b1 = 0.0;
  std::string label;

  // 2 b0 / (eps^2 mu) - 1; positive iff 0 is non-attainable.
  double lower_margin() const;
  // -2 b1 / (eps^2 mu) - 1; positive iff 1 is non-attainable.
  double upper_margin() const;
};

enum class Condition {
  kParameters,
  kLowerDrift,
  kUpperDrift,
  kSigmaEnvelope,
  kSigmaNondegenerate,
  kLowerNonattainability,
  kUpperNonattainability,
};

const char* condition_name(Condition c);

struct ConditionCheck {
  Condition condition;
  bool passed = false;
  std::optional<double> witness;  // offending x on failure, when there is one
  std::string detail;
};

struct ValidationReport {
  std::vector<ConditionCheck> checks;

  bool passed() const;
  std::vector<Condition> failed() const;
  std::string summary() const;
};

struct ValidationOptions {
  std::size_t grid_points = 10001;
  // Inner thresholds x0 at which inf sigma^2 over [x0, 1 - x0] is checked.
  std::vector<double> nondegeneracy_thresholds = {0.01, 0.05, 0.1, 0.25, 0.45};
};

// Grid check of the standing assumptions. Pure; the same inputs always give
// the same report. Throws std::invalid_argument for grid_points < 16.
ValidationReport validate_envelope(const ModelSpec& model,
                                   const ValidationOptions& opts = {});

struct OpenInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v > lo && v < hi; }
};

// Exponents m for which x^-m and (1-x)^-m are Lyapunov functions at both
// boundaries: (0, min(2 b0, -2 b1) / (eps^2 mu) - 1). Throws InvalidModel.
OpenInterval admissible_m_interval(const ModelSpec& model,
                                   const ValidationOptions& opts = {});

// Constants for the hitting-time bounds at exponent m and rate c.
struct BoundParams {
  double m = 0.0;
  double c = 0.0;
  double alpha = 0.0;
  double alpha_max = 0.0;  // supremum of feasible thresholds for (m, c)
  double C_lower = 0.0;
  double C_upper = 0.0;
  double C_max = 0.0;
};

// Builds BoundParams, choosing alpha = alpha_max unless `alpha` is given,
// in which case it must lie in (0, alpha_max]. The threshold satisfies
//   alpha <= min(beta0, beta1, gap_lo / (2 (c - k)), gap_hi / (2 (c - k)))
// with k = eps^2 m (m + 1) mu / 2; the last two terms are dropped if c <= k.
BoundParams make_bound_params(const ModelSpec& model, double m, double c,
                              std::optional<double> alpha = std::nullopt,
                              const ValidationOptions& opts = {});

// Largest alpha that any valid envelope of this drift/sigma certifies,
// over the model's own envelope and envelopes re-derived on a grid for
// beta in {0.01, ..., 0.25}. Zero if none validates.
double max_certified_threshold(const ModelSpec& model,
                               const ValidationOptions& opts = {});

// Copy of `model` with b0/b1 replaced by grid extrema of the drift on
// [0, beta0) and (1 - beta1, 1].
ModelSpec derive_envelope(const ModelSpec& model, double beta0, double beta1,
                          std::size_t grid_points = 10001);

// B(x) = theta1 (1 - x) - theta2 x, sigma = sqrt(x (1 - x)), mu_bound = 1.
// beta0/beta1 are picked from {0.01, ..., 0.25} to maximize the m-window,
// with b0/b1 in closed form. Throws InvalidModel if no envelope validates.
ModelSpec builtin_wf_mutation(double theta1, double theta2, double epsilon);

// The scanned envelope without the validation step.
ModelSpec wf_mutation_max_window(double theta1, double theta2, double epsilon);

// Same diffusion with a caller-chosen envelope width on each side.
ModelSpec wf_mutation_with_envelope(double theta1, double theta2,
                                    double epsilon, double beta0,
                                    double beta1);

// Coefficients compiled from expression strings over x. Throws ExprError on
// a malformed expression; the envelope is not validated here.
ModelSpec custom_model(const std::string& drift_expr,
                       const std::string& sigma_expr, double epsilon,
                       double mu_bound, double beta0, double b0, double beta1,
                       double b1);

struct QuadratureOptions {
  double tolerance = 1e-12;  // requested relative tolerance
  // Accepted error estimate relative to max(|integral|, scale).
  double max_error = 1e-6;
  double delta = 1e-10;  // integration range is (delta, 1 - delta)
  double cell_width = 0.25;  // tabulation step in logit coordinates
};

// Stationary density p(x) proportional to exp(Phi(x)) / (eps^2 sigma^2(x)),
// Phi(x) = int_{1/2}^x 2 B / (eps^2 sigma^2). Phi and the cumulative mass are
// tabulated on a logit grid at construction; pointwise values add one short
// integral from the nearest node. Throws QuadratureError if any piece does
// not converge.
class StationaryDensity {
 public:
  explicit StationaryDensity(ModelSpec model, QuadratureOptions opts = {});

  double operator()(double x) const;
  // Probability of [a, b] (clipped to the integration range).
  double mass(double a, double b) const;
  // Probability of (delta, x].
  double cdf(double x) const;
  double normalizer() const { return normalizer_; }
  const ModelSpec& model() const { return model_; }

 private:
  std::size_t cell_of(double z) const;
  double phi_at(double z) const;
  double unnormalized_at(double z) const;
  double cumulative_at(double z) const;

  ModelSpec model_;
  QuadratureOptions opts_;
  double z_lo_ = 0.0;
  double z_hi_ = 0.0;
  std::vector<double> nodes_;  // logit coordinates, node 0 == z_lo_
  std::vector<double> phi_;      // Phi at nodes
  std::vector<double> cum_;      // mass of (z_lo_, node]
  double shift_ = 0.0;           // max Phi, keeps exp in range
  double normalizer_ = 1.0;
};

double analytic_stationary_density(const ModelSpec& model, double x,
                                   const QuadratureOptions& opts = {});

}  // namespace wfdiff

#endif  // WFDIFF_MODEL_HPP
