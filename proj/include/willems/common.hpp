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

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace willems {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Violated preconditions: dimension mismatches, out-of-range windows,
// non-finite entries, malformed configurations.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation that was well-posed but failed numerically
// (non-unique solve, rank deficiency beyond tolerance).
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Outcome of a check whose conclusion is only meaningful under a
// persistency-of-excitation hypothesis. When the hypothesis fails the
// check reports that instead of a verdict.
enum class Verdict { holds, fails, hypothesis_violated };

std::string_view to_string(Verdict v);

}  // namespace willems
