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


#ifndef WFDIFF_CLI_COMMANDS_HPP
#define WFDIFF_CLI_COMMANDS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "wfdiff/cli/config.hpp"

namespace wfdiff::cli {

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitInvalid = 2;  // invalid model or parameters, or a fail verdict
inline constexpr int kExitInconclusive = 3;

struct RunContext {
  unsigned workers = 1;
  bool svg = false;
  std::ostream* log = nullptr;  // progress and summaries; null is silent
};

// Seed of a command's substream; each command draws from its own stream of
// the master seed, so `all` and individual runs agree.
std::uint64_t command_seed(std::uint64_t master, std::string_view command);

int cmd_validate(const ExperimentConfig& cfg, const RunContext& ctx);
int cmd_hitting(const ExperimentConfig& cfg, const RunContext& ctx);
int cmd_invariant(const ExperimentConfig& cfg, const RunContext& ctx);
int cmd_converge(const ExperimentConfig& cfg, const RunContext& ctx);
int cmd_all(const ExperimentConfig& cfg, const RunContext& ctx);

// Dispatches by name and maps exceptions to exit statuses.
int run_command(std::string_view name, const ExperimentConfig& cfg,
                const RunContext& ctx);

// Loads the config itself too, so unreadable files map to status 1.
int run_from_file(std::string_view name, const std::string& config_path,
                  const RunContext& ctx,
                  const std::optional<std::uint64_t>& seed_override,
                  const std::optional<std::string>& out_override);

}  // namespace wfdiff::cli

#endif  // WFDIFF_CLI_COMMANDS_HPP
