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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "willems/lti.hpp"

namespace willems {

// Trajectory CSV: header `t,u_0..u_{m-1}[,x_0..x_{n-1}][,y_0..y_{p-1}]`,
// one row per time step, values printed with 17 significant digits.
std::string trajectory_to_csv(const Trajectory& traj);
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& is);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

// Round-trip-exact decimal text for a double.
std::string format_real(double v);

// Splits one CSV line on commas (no quoting; the formats here never need it).
std::vector<std::string> split_csv_line(const std::string& line);

// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace willems
