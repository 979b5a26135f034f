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

#include <limits>
#include <string_view>
#include <utility>
#include <vector>

#include "willems/common.hpp"

namespace willems {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// minimize 0.5 x'Px + q'x + constant
// subject to A_eq x = b_eq, lower <= x <= upper.
// Empty lower/upper vectors mean the coordinate is unbounded on that side.
struct QuadraticProgram {
  Matrix P;
  Vector q;
  Matrix A_eq;
  Vector b_eq;
  Vector lower;
  Vector upper;
  double constant = 0.0;

  // ridge * I is added to P on each [first, first + count) block.
  double ridge = 0.0;
  std::vector<std::pair<Index, Index>> ridge_blocks;

  Index num_variables() const { return q.size(); }
  double objective(const Vector& x) const;
};

enum class QpStatus { optimal, infeasible, unbounded, max_iter, numerical_failure };

std::string_view to_string(QpStatus s);

struct QpSettings {
  double tol = 1e-9;
  int max_iter = 2000;
};

struct QpSolution {
  Vector x;
  double objective = 0.0;
  QpStatus status = QpStatus::numerical_failure;
  double kkt_residual = kInf;
  Vector eq_multipliers;     // lambda in  Px + q + A_eq' lambda = z
  Vector bound_multipliers;  // z: >= 0 at active lower bounds, <= 0 at upper
  int iterations = 0;
};

// Primal active-set method on a null-space basis of the working
// constraints. Zero-curvature directions of a semidefinite P are followed
// as rays until a bound blocks them. Phase 1 minimizes ||A_eq x - b_eq||^2
// over the box with the same iteration. Among optimal points on the final
// face, the one of least norm reachable along the face is returned.
QpSolution solve_qp(const QuadraticProgram& prob, const QpSettings& settings = {});

// Scaled max of primal infeasibility, stationarity and multiplier-sign
// violations at x.
double kkt_residual(const QuadraticProgram& prob, const Vector& x,
                    double active_tol = 1e-9);

}  // namespace willems
