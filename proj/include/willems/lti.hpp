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
#include <optional>
#include <vector>

#include "willems/common.hpp"

namespace willems {

// x_{t+1} = A x_t + B u_t,  y_t = C x_t + D u_t.
class LtiSystem {
 public:
  LtiSystem(Matrix a, Matrix b, Matrix c, Matrix d);

  const Matrix& A() const { return a_; }
  const Matrix& B() const { return b_; }
  const Matrix& C() const { return c_; }
  const Matrix& D() const { return d_; }

  Index n() const { return a_.rows(); }
  Index m() const { return b_.cols(); }
  Index p() const { return c_.rows(); }

 private:
  Matrix a_, b_, c_, d_;
};

// Time-indexed samples stored column-wise: column t holds the sample at
// time t. States and outputs are optional; inputs are always present.
class Trajectory {
 public:
  Trajectory(Matrix inputs, std::optional<Matrix> states,
             std::optional<Matrix> outputs);

  Index length() const { return inputs_.cols(); }
  Index m() const { return inputs_.rows(); }
  Index n() const { return states_ ? states_->rows() : 0; }
  Index p() const { return outputs_ ? outputs_->rows() : 0; }

  const Matrix& inputs() const { return inputs_; }
  bool has_states() const { return states_.has_value(); }
  bool has_outputs() const { return outputs_.has_value(); }
  const Matrix& states() const;
  const Matrix& outputs() const;

  // Same trajectory with the state channel dropped.
  Trajectory without_states() const;

 private:
  Matrix inputs_;
  std::optional<Matrix> states_;
  std::optional<Matrix> outputs_;
};

// Ordered collection of trajectories sharing channel dimensions.
class TrajectorySet {
 public:
  explicit TrajectorySet(std::vector<Trajectory> trajectories);

  Index size() const { return static_cast<Index>(trajectories_.size()); }
  const Trajectory& operator[](Index i) const { return trajectories_[static_cast<size_t>(i)]; }
  const std::vector<Trajectory>& trajectories() const { return trajectories_; }
  auto begin() const { return trajectories_.begin(); }
  auto end() const { return trajectories_.end(); }

  Index m() const { return trajectories_.front().m(); }
  Index n() const { return trajectories_.front().n(); }
  Index p() const { return trajectories_.front().p(); }
  bool has_states() const;
  bool has_outputs() const;

  // Initial states as the columns of an n x tau matrix.
  Matrix initial_states() const;

 private:
  std::vector<Trajectory> trajectories_;
};

// Full input-state-output response from x0 under the given inputs
// (m x T, column t = u_t).
Trajectory simulate(const LtiSystem& sys, const Vector& x0, const Matrix& inputs);

// Largest per-step relative violation of the state and output equations
// over a trajectory that carries states and outputs.
double dynamics_residual(const LtiSystem& sys, const Trajectory& traj);

// m x T matrix of i.i.d. uniform samples on [low, high]. Deterministic for
// a given seed on every platform.
Matrix random_input(Index m, Index length, double low, double high,
                    std::uint64_t seed);

Trajectory window(const Trajectory& traj, Index start, Index length);

// Random system with exactly structured subspaces: states split into
// (controllable, unobservable), (controllable, observable) and
// (uncontrollable, observable) blocks of an upper block-triangular A,
// B and C zero on the corresponding blocks, then a seeded permutation of
// the state coordinates. Generic entries make the controllable and
// unobservable subspaces exactly the first two blocks' span and the first
// block's span.
struct RandomSystemRecipe {
  Index n = 4;
  Index m = 1;
  Index p = 1;
  Index controllable_dim = -1;  // -1: n
  Index unobservable_dim = 0;   // <= controllable_dim
  // The uncontrollable block is c I (lowers the minimal-polynomial degree).
  bool scalar_uncontrollable = false;
  bool feedthrough = false;
};

LtiSystem random_system(const RandomSystemRecipe& recipe, std::uint64_t seed);

}  // namespace willems
