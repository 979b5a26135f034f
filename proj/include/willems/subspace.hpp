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

#include <optional>

#include "willems/lti.hpp"
#include "willems/numerics.hpp"

namespace willems {

// Orthonormal basis of span{X, A X, ..., A^{n-1} X}, built by block
// Arnoldi with full reorthogonalization.
SubspaceBasis krylov_subspace(const Matrix& a, const Matrix& x0,
                              const RankTolerance& tol = {});

// im [B, AB, ..., A^{n-1} B]
SubspaceBasis controllable_subspace(const LtiSystem& sys,
                                    const RankTolerance& tol = {});

// ker [C; CA; ...; CA^{n-1}], computed as the orthogonal complement of the
// Krylov subspace of (A^T, C^T).
SubspaceBasis unobservable_subspace(const LtiSystem& sys,
                                    const RankTolerance& tol = {});

// Subspace orthogonal to s in its ambient space.
SubspaceBasis orthogonal_complement(const SubspaceBasis& s);

struct MinPolyDegree {
  Index delta_min = 1;
};

// Smallest d >= 1 with vec(A^d) in span{vec(I), ..., vec(A^{d-1})}. Powers
// are scaled by ||A||_F^k before the rank test.
MinPolyDegree min_poly_degree(const Matrix& a, const RankTolerance& tol = {});

struct ImageCheckOptions {
  // Upper bound on the minimal-polynomial degree; min_poly_degree(A) when
  // unset.
  std::optional<Index> delta;
  RankTolerance rank_tol;
  double subspace_tol = kSubspaceTolerance;
};

struct ImageCheckReport {
  Verdict verdict = Verdict::hypothesis_violated;
  Index delta = 0;
  Index required_pe_order = 0;
  Index image_dim = 0;
  Index target_dim = 0;
  double residual = 0.0;  // subspace_distance(image, target); 0 when gated
  std::string diagnostic;
};

// Compares im [H_1(x^i_[0,T^i-L]) ...; H_L(u^i) ...] with
// (R + K[x_0^1..x_0^tau]) x R^{mL}. Gated on collective persistency of
// excitation of order delta + L.
ImageCheckReport theorem1_image_check(const LtiSystem& sys,
                                      const TrajectorySet& data, Index horizon,
                                      const ImageCheckOptions& opts = {});

// Stacked state/input data matrix whose image is compared above.
Matrix state_input_data_matrix(const TrajectorySet& data, Index horizon);

// R + O + K[x_0^1, ..., x_0^tau]
SubspaceBasis parameterizable_initial_states(const LtiSystem& sys,
                                             const Matrix& initial_states,
                                             const RankTolerance& tol = {});

// xbar0 in R + O + K[x_0^1, ..., x_0^tau]
bool theorem1_state_condition(const LtiSystem& sys, const TrajectorySet& data,
                              const Vector& xbar0, const RankTolerance& tol = {},
                              double subspace_tol = kSubspaceTolerance);

}  // namespace willems
