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

#include "willems/lti.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "willems/numerics.hpp"

namespace willems {

namespace {

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

LtiSystem::LtiSystem(Matrix a, Matrix b, Matrix c, Matrix d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  if (a_.rows() != a_.cols()) throw InputError("LtiSystem: A is " + dims(a_) + ", not square");
  if (b_.rows() != a_.rows()) throw InputError("LtiSystem: B is " + dims(b_) + ", expected " + std::to_string(a_.rows()) + " rows");
  if (c_.cols() != a_.rows()) throw InputError("LtiSystem: C is " + dims(c_) + ", expected " + std::to_string(a_.rows()) + " columns");
  if (d_.rows() != c_.rows() || d_.cols() != b_.cols()) {
    throw InputError("LtiSystem: D is " + dims(d_) + ", expected " +
                     std::to_string(c_.rows()) + "x" + std::to_string(b_.cols()));
  }
  require_finite(a_, "LtiSystem A");
  require_finite(b_, "LtiSystem B");
  require_finite(c_, "LtiSystem C");
  require_finite(d_, "LtiSystem D");
}

Trajectory::Trajectory(Matrix inputs, std::optional<Matrix> states,
                       std::optional<Matrix> outputs)
    : inputs_(std::move(inputs)), states_(std::move(states)), outputs_(std::move(outputs)) {
  if (inputs_.cols() < 1) throw InputError("Trajectory: length must be positive");
  if (states_ && states_->cols() != inputs_.cols()) {
    throw InputError("Trajectory: state sequence length differs from input length");
  }
  if (outputs_ && outputs_->cols() != inputs_.cols()) {
    throw InputError("Trajectory: output sequence length differs from input length");
  }
  require_finite(inputs_, "Trajectory inputs");
  if (states_) require_finite(*states_, "Trajectory states");
  if (outputs_) require_finite(*outputs_, "Trajectory outputs");
}

const Matrix& Trajectory::states() const {
  if (!states_) throw InputError("trajectory carries no states");
  return *states_;
}

const Matrix& Trajectory::outputs() const {
  if (!outputs_) throw InputError("trajectory carries no outputs");
  return *outputs_;
}

Trajectory Trajectory::without_states() const {
  return Trajectory(inputs_, std::nullopt, outputs_);
}

TrajectorySet::TrajectorySet(std::vector<Trajectory> trajectories)
    : trajectories_(std::move(trajectories)) {
  if (trajectories_.empty()) throw InputError("TrajectorySet: empty set");
  const Trajectory& first = trajectories_.front();
  for (size_t i = 1; i < trajectories_.size(); ++i) {
    const Trajectory& t = trajectories_[i];
    if (t.m() != first.m() || t.has_states() != first.has_states() ||
        t.has_outputs() != first.has_outputs() || t.n() != first.n() ||
        t.p() != first.p()) {
      throw InputError("TrajectorySet: trajectory " + std::to_string(i) +
                       " has channel dimensions inconsistent with trajectory 0");
    }
  }
}

bool TrajectorySet::has_states() const { return trajectories_.front().has_states(); }
bool TrajectorySet::has_outputs() const { return trajectories_.front().has_outputs(); }

Matrix TrajectorySet::initial_states() const {
  Matrix x0(n(), size());
  for (Index i = 0; i < size(); ++i) x0.col(i) = (*this)[i].states().col(0);
  return x0;
}

Trajectory simulate(const LtiSystem& sys, const Vector& x0, const Matrix& inputs) {
  if (x0.size() != sys.n()) {
    throw InputError("simulate: x0 has dimension " + std::to_string(x0.size()) +
                     ", system has n = " + std::to_string(sys.n()));
  }
  if (inputs.rows() != sys.m()) {
    throw InputError("simulate: inputs have " + std::to_string(inputs.rows()) +
                     " channels, system has m = " + std::to_string(sys.m()));
  }
  const Index T = inputs.cols();
  Matrix x(sys.n(), T);
  Matrix y(sys.p(), T);
  Vector state = x0;
  for (Index t = 0; t < T; ++t) {
    x.col(t) = state;
    y.col(t) = sys.C() * state + sys.D() * inputs.col(t);
    state = sys.A() * state + sys.B() * inputs.col(t);
  }
  return Trajectory(inputs, std::move(x), std::move(y));
}

double dynamics_residual(const LtiSystem& sys, const Trajectory& traj) {
  const Matrix& u = traj.inputs();
  const Matrix& x = traj.states();
  const Matrix& y = traj.outputs();
  double worst = 0.0;
  for (Index t = 0; t < traj.length(); ++t) {
    const Vector y_pred = sys.C() * x.col(t) + sys.D() * u.col(t);
    worst = std::max(worst, (y.col(t) - y_pred).norm() / std::max(1.0, y_pred.norm()));
    if (t + 1 < traj.length()) {
      const Vector x_pred = sys.A() * x.col(t) + sys.B() * u.col(t);
      worst = std::max(worst, (x.col(t + 1) - x_pred).norm() / std::max(1.0, x_pred.norm()));
    }
  }
  return worst;
}

Matrix random_input(Index m, Index length, double low, double high,
                    std::uint64_t seed) {
  if (!(low < high)) throw InputError("random_input: requires low < high");
  if (length < 1 || m < 1) throw InputError("random_input: m and T must be positive");
  // Top 53 bits of each draw give a uniform double on [0, 1).
  std::mt19937_64 engine(seed);
  Matrix u(m, length);
  for (Index t = 0; t < length; ++t) {
    for (Index i = 0; i < m; ++i) {
      const double unit = static_cast<double>(engine() >> 11) * 0x1.0p-53;
      u(i, t) = low + (high - low) * unit;
    }
  }
  return u;
}

Trajectory window(const Trajectory& traj, Index start, Index length) {
  if (start < 0 || length < 1 || start + length > traj.length()) {
    throw InputError("window: [" + std::to_string(start) + ", " +
                     std::to_string(start + length) + ") exceeds trajectory length " +
                     std::to_string(traj.length()));
  }
  std::optional<Matrix> x, y;
  if (traj.has_states()) x = traj.states().middleCols(start, length);
  if (traj.has_outputs()) y = traj.outputs().middleCols(start, length);
  return Trajectory(traj.inputs().middleCols(start, length), std::move(x), std::move(y));
}

}  // namespace willems

namespace willems {

LtiSystem random_system(const RandomSystemRecipe& recipe, std::uint64_t seed) {
  const Index n = recipe.n, m = recipe.m, p = recipe.p;
  const Index r = recipe.controllable_dim < 0 ? n : recipe.controllable_dim;
  const Index q = recipe.unobservable_dim;
  if (n < 1 || m < 1 || p < 1) throw InputError("random_system: n, m, p must be positive");
  if (r < 0 || r > n) throw InputError("random_system: controllable_dim must lie in [0, n]");
  if (q < 0 || q > r) throw InputError("random_system: unobservable_dim must lie in [0, controllable_dim]");

  std::mt19937_64 engine(seed);
  auto draw = [&] { return static_cast<double>(engine() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  auto fill = [&](Index rows, Index cols) {
    Matrix x(rows, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < rows; ++i) x(i, j) = draw();
    }
    return x;
  };

  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Matrix a = fill(n, n) * scale;
  a.bottomLeftCorner(n - r, r).setZero();
  a.block(q, 0, n - q, q).setZero();
  if (recipe.scalar_uncontrollable && r < n) {
    a.bottomRightCorner(n - r, n - r) = Matrix::Identity(n - r, n - r) * (0.9 * draw());
  }
  Matrix b = fill(n, m);
  b.bottomRows(n - r).setZero();
  Matrix c = fill(p, n);
  c.leftCols(q).setZero();
  Matrix d = recipe.feedthrough ? fill(p, m) : Matrix::Zero(p, m);

  std::vector<Index> perm(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), engine);
  Matrix ap(n, n), bp(n, m), cp(p, n);
  for (Index i = 0; i < n; ++i) {
    const Index pi = perm[static_cast<size_t>(i)];
    bp.row(pi) = b.row(i);
    cp.col(pi) = c.col(i);
    for (Index j = 0; j < n; ++j) ap(pi, perm[static_cast<size_t>(j)]) = a(i, j);
  }
  return LtiSystem(ap, bp, cp, d);
}

}  // namespace willems
