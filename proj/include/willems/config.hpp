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
#include <optional>
#include <string>
#include <vector>

#include "willems/lti.hpp"
#include "willems/multiagent.hpp"
#include "willems/predictive.hpp"

namespace willems {

// Each parser validates against the target module's preconditions and
// throws InputError naming the offending field. Matrices are nested
// row-major arrays; vectors are flat arrays.

struct Theorem1Config {
  std::optional<LtiSystem> system;
  std::optional<RandomSystemRecipe> recipe;  // used when no explicit system
  Index trajectories = 1;
  Index length = 30;
  Index horizon = 3;
  std::optional<Index> delta;
  Matrix initial_states;  // n x tau; empty = zero
  double input_low = -1.0;
  double input_high = 1.0;
  std::vector<Vector> test_states;
  std::uint64_t seed = 0;
};

struct DeepcConfig {
  LtiSystem system;
  std::vector<Controller> controllers;
  PredictiveConfig predictive;
  std::uint64_t seed = 0;
};

struct IdentifyConfig {
  Matrix Abar;
  Matrix Bbar;
  std::vector<Index> agent_counts;
  SweepOptions sweep;
  Anchor anchor;
  double tol = 1e-6;
  Index seeds = 1;  // sweep repetitions, seeds seed .. seed + seeds - 1
  std::uint64_t seed = 0;
};

struct CheckPeConfig {
  std::vector<std::filesystem::path> trajectories;
  std::optional<Index> depth;
};

struct SimulateConfig {
  LtiSystem system;
  Vector x0;
  std::filesystem::path inputs;
  bool include_states = true;
  std::string output = "trajectory.csv";
};

Theorem1Config load_theorem1_config(const std::filesystem::path& path);
DeepcConfig load_deepc_config(const std::filesystem::path& path);
IdentifyConfig load_identify_config(const std::filesystem::path& path);
// A .csv path is taken as a single trajectory file.
CheckPeConfig load_check_pe_config(const std::filesystem::path& path);
SimulateConfig load_simulate_config(const std::filesystem::path& path);

}  // namespace willems
