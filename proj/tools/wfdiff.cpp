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


#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wfdiff/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"wfdiff: simulation checks for one-dimensional diffusions on (0, 1)"};
  app.set_version_flag("--version", wfdiff::cli::kVersion);
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  unsigned workers = 1;
  bool svg = false;
  app.add_option("--config", config, "experiment configuration (INI)")
      ->required();
  app.add_option("--seed", seed, "master seed, overrides the config");
  app.add_option("--out", out, "output directory, overrides the config");
  app.add_option("--workers", workers, "worker threads")
      ->check(CLI::Range(1u, 1024u));
  app.add_flag("--svg", svg, "also write curve.svg from converge");

  const std::pair<const char*, const char*> commands[] = {
      {"validate", "check the envelope conditions and the m-window"},
      {"hitting", "hitting-time moment and occupation bounds"},
      {"invariant", "cycle estimator of the invariant measure"},
      {"converge", "distance to the stationary law over time"},
      {"all", "validate, then every experiment"},
  };
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : wfdiff::cli::kExitInvalid;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  wfdiff::cli::RunContext ctx{workers, svg, &std::cerr};
  return wfdiff::cli::run_from_file(name, config, ctx, seed, out);
}
