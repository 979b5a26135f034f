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

#include <vector>

#include "willems/lti.hpp"
#include "willems/numerics.hpp"

namespace willems {

inline constexpr double kParameterizeThreshold = 1e-8;

// [H_L(u^1) ... H_L(u^tau); H_L(y^1) ... H_L(y^tau)]
Matrix build_trajectory_matrix(const TrajectorySet& data, Index horizon);

struct ParamSolution {
  Vector g;
  double residual_norm = 0.0;
  // residual_norm / max(1, ||target||)
  double relative_residual = 0.0;
  bool parameterizable = false;
};

// Minimum-norm g with [u; y] ~ build_trajectory_matrix(data, L) g, where
// L is inferred from the target lengths (target_u is mL, target_y is pL).
ParamSolution parameterize(const TrajectorySet& data, const Vector& target_u,
                           const Vector& target_y,
                           double threshold = kParameterizeThreshold);
ParamSolution parameterize(const TrajectorySet& data, const Trajectory& target,
                           double threshold = kParameterizeThreshold);

// Initial state certified by g: [H_1(x^1_[0,T^1-L]) ... ] g.
Vector reconstruct_state(const TrajectorySet& data, const Vector& g, Index horizon);

struct ResponseOperators {
  Matrix observability;  // O_L, (L p) x n, row blocks C A^k
  Matrix toeplitz;       // T_L, (L p) x (L m), block lower triangular
};

// y_[0,L-1] = O_L x_0 + T_L u_[0,L-1]
ResponseOperators response_operators(const LtiSystem& sys, Index horizon);

// Samples stacked time-major into one column: [f_0; f_1; ...; f_{T-1}].
Vector stack_samples(const Matrix& signal);
Matrix unstack_samples(const Vector& stacked, Index channels);

struct Corollary1Options {
  Index delta = 0;  // bound on the minimal-polynomial degree (required)
  double threshold = kParameterizeThreshold;
  RankTolerance rank_tol;
};

struct Corollary1Report {
  Verdict verdict = Verdict::hypothesis_violated;
  Index required_pe_order = 0;
  std::vector<double> residuals;  // relative residual of the window at t
  double max_residual = 0.0;
  std::string diagnostic;
};

// Parameterizes every length-L window (u_[t,t+L-1], y_[t,t+L-1]) of a
// length-K run against the run's first T samples. Gated on the prefix
// input being persistently exciting of order delta + L.
Corollary1Report check_corollary1(const Trajectory& run, Index prefix_length,
                                  Index horizon, const Corollary1Options& opts);

}  // namespace willems
