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


#ifndef WFDIFF_CLI_CONFIG_HPP
#define WFDIFF_CLI_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wfdiff/error.hpp"
#include "wfdiff/invariant.hpp"
#include "wfdiff/model.hpp"
#include "wfdiff/sde.hpp"

namespace wfdiff::cli {

inline constexpr const char* kVersion = "0.1.0";

// Unreadable or syntactically broken input; maps to exit status 1.
class ConfigIoError : public Error {
 public:
  using Error::Error;
};

struct ModelBlock {
  std::string family = "wf_mutation";
  double theta1 = 1.0;
  double theta2 = 1.0;
  double epsilon = 1.0;
  std::optional<double> beta0;
  std::optional<double> beta1;
  std::string drift_expr;
  std::string sigma_expr;
  double mu_bound = 1.0;
  double b0 = 0.0;
  double b1 = 0.0;

  // The envelope as configured; not validated.
  ModelSpec build() const;
};

struct HittingBlock {
  double m = 0.5;
  std::vector<double> c = {1.0};
  std::optional<double> alpha;
  // Step size for this block; defaults to [sim] dt.
  std::optional<double> dt;
  std::vector<std::string> checks = {"prop1", "prop2", "thm1", "occupation"};
  std::size_t n = 2000;
  bool dump_samples = false;
  bool dump_path = false;
  double path_x0 = 0.05;
  double path_t_max = 10.0;
  std::size_t path_stride = 100;
  std::size_t lemma1_n = 1000;  // 0 disables the exit-side table
  double lemma1_x0 = 0.05;
  double lemma1_upper = 0.1;
  std::vector<double> lemma1_lowers = {0.025, 0.0125, 0.00625};
};

struct InvariantBlock {
  CycleConfig cycles;
  std::size_t chains = 4;
  std::size_t cycles_per_chain = 500;
};

struct ConvergeBlock {
  std::optional<double> x0 = 0.05;  // empty: start from the stationary law
  std::vector<double> times = {1.0, 2.0, 5.0, 10.0, 20.0};
  std::size_t replicas = 10000;
  std::size_t bins = 50;
  double m = 0.5;
  double c = 0.1;
  std::optional<double> alpha = 0.01;
  std::size_t pairs = 2000;  // 0 disables the coupling run
  std::size_t resamples = 200;
};

struct ExperimentConfig {
  std::string path;
  std::uint64_t hash = 0;  // FNV-1a over the config and model file bytes
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  ModelBlock model;
  SimConfig sim;
  ValidationOptions validation;
  HittingBlock hitting;
  InvariantBlock invariant;
  ConvergeBlock converge;
};

// Parses an INI file. A top-level `model = PATH` key loads the model keys
// from a separate file (relative to the config); otherwise they come from
// the [model] section. Unknown keys are rejected.
ExperimentConfig load_config(const std::string& path);

std::vector<double> parse_list(const std::string& text);

}  // namespace wfdiff::cli

#endif  // WFDIFF_CLI_CONFIG_HPP
