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

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "willems/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Data-driven trajectory parameterization, DeePC and multi-agent identification"};
  app.require_subcommand(1, 1);

  willems::CommandOptions opts;
  std::string config, out_dir = "willems_out";
  std::uint64_t seed = 0;
  bool no_timing = false;

  const std::pair<const char*, const char*> commands[] = {
      {"verify-theorem1", "Check the data-matrix image and initial-state conditions"},
      {"deepc", "Run the closed-loop MPC / DeePC experiment"},
      {"identify", "Identify a multi-agent network and sweep trajectory counts"},
      {"check-pe", "Print the persistency-of-excitation order of trajectory CSVs"},
      {"simulate", "Simulate a system on an input CSV"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON config (check-pe also takes a trajectory CSV)")
        ->required();
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_flag("--no-timing", no_timing, "Write 0 in timing columns (bitwise-reproducible output)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : willems::kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  opts.config = config;
  opts.out_dir = out_dir;
  opts.record_timing = !no_timing;
  if (chosen->count("--seed")) opts.seed = seed;
  return willems::run_command(chosen->get_name(), opts, std::cout, std::cerr);
}
