// Copyright 2026 The willems Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace willems {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitHypothesis = 3;
inline constexpr int kExitInfeasible = 4;
inline constexpr int kExitNumerical = 5;

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;  // overrides the config seed
  std::filesystem::path out_dir = "willems_out";
  bool record_timing = true;  // false writes 0 in timing columns
};

int cmd_verify_theorem1(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_deepc(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_identify(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_check_pe(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err);

// Dispatches by command name and maps exceptions to exit codes
// (InputError 2, NumericalError 5).
int run_command(const std::string& name, const CommandOptions& opts, std::ostream& out,
                std::ostream& err);

}  // namespace willems
