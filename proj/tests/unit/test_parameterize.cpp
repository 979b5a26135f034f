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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "willems/hankel.hpp"
#include "willems/parameterize.hpp"
#include "willems/subspace.hpp"

using namespace willems;

namespace {

LtiSystem benchmark() {
  Matrix a(4, 4);
  a << 1, .5, 0, 0, 0, 1, 0, 0, 0, 0, .9, .5, 0, 0, 0, .9;
  Matrix b(4, 1);
  b << .125, .5, 0, 0;
  Matrix c(2, 4);
  c << 1, 0, 0, 0, 0, 0, 1, 0;
  return LtiSystem(a, b, c, Matrix::Zero(2, 1));
}

TrajectorySet io_only(const TrajectorySet& s) {
  std::vector<Trajectory> v;
  for (const Trajectory& t : s) v.push_back(t.without_states());
  return TrajectorySet(v);
}

}  // namespace

TEST(StackSamples, TimeMajorAndInverse) {
  Matrix f(2, 3);
  f << 1, 2, 3, 4, 5, 6;
  Vector expected(6);
  expected << 1, 4, 2, 5, 3, 6;
  EXPECT_EQ(stack_samples(f), expected);
  EXPECT_EQ(unstack_samples(expected, 2), f);
  EXPECT_THROW(unstack_samples(expected, 4), InputError);
}

TEST(ResponseOperators, ReproduceSimulation) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomSystemRecipe r;
    r.n = 4;
    r.m = 2;
    r.p = 2;
    r.feedthrough = true;
    const LtiSystem s = random_system(r, seed);
    const ResponseOperators ops = response_operators(s, 5);
    const Vector x0 = [&] { std::mt19937_64 g(seed); return Vector(oracle::uniform(4, 1, g)); }();
    const Matrix u = random_input(2, 5, -1, 1, seed);
    Matrix x, y;
    oracle::step_response(s, x0, u, x, y);
    EXPECT_LT((ops.observability * x0 + ops.toeplitz * stack_samples(u) - stack_samples(y)).norm(), 1e-12);
    // T_L is block lower triangular with D on the diagonal.
    EXPECT_EQ(ops.toeplitz.block(0, 2, 2, 8).norm(), 0.0);
    EXPECT_EQ(ops.toeplitz.block(0, 0, 2, 2), s.D());
  }
}

TEST(TrajectoryMatrix, StacksInputAboveOutputHankels) {
  const LtiSystem s = benchmark();
  const TrajectorySet data({simulate(s, Vector::Zero(4), random_input(1, 12, -1, 1, 1)).without_states()});
  const Matrix h = build_trajectory_matrix(data, 3);
  EXPECT_EQ(h.topRows(3), mosaic_hankel(data, 3, Channel::inputs));
  EXPECT_EQ(h.bottomRows(6), mosaic_hankel(data, 3, Channel::outputs));
}

TEST(Parameterize, ReproducesReachableTrajectoryAndRecoversState) {
  const LtiSystem s = benchmark();
  const TrajectorySet full({simulate(s, Vector::Zero(4), random_input(1, 30, -1, 1, 2))});
  const TrajectorySet data = io_only(full);
  Vector x0(4);
  x0 << 0.3, -0.2, 0, 0;  // controllable, so in R
  const Trajectory target = simulate(s, x0, random_input(1, 5, -1, 1, 3));
  const ParamSolution sol = parameterize(data, target.without_states());
  EXPECT_TRUE(sol.parameterizable);
  EXPECT_LE(sol.relative_residual, 1e-10);
  // The certified initial state matches the true one since O_L is injective.
  EXPECT_LT((reconstruct_state(full, sol.g, 5) - x0).norm(), 1e-8);
}

TEST(Parameterize, RejectsUnreachableInitialState) {
  const LtiSystem s = benchmark();
  const TrajectorySet data =
      io_only(TrajectorySet({simulate(s, Vector::Zero(4), random_input(1, 30, -1, 1, 2))}));
  Vector x0 = Vector::Zero(4);
  x0[2] = 1.0;
  const Trajectory target = simulate(s, x0, random_input(1, 5, -1, 1, 3));
  const ParamSolution sol = parameterize(data, target.without_states());
  EXPECT_FALSE(sol.parameterizable);
  // Distance of the target from the image: the y_2 response 0.9^k has no
  // counterpart in the data, so the residual is of order one.
  EXPECT_GT(sol.relative_residual, 1e-2);
}

TEST(Parameterize, ResidualEqualsProjectionDistance) {
  const LtiSystem s = benchmark();
  const TrajectorySet data =
      io_only(TrajectorySet({simulate(s, Vector::Zero(4), random_input(1, 30, -1, 1, 5))}));
  std::mt19937_64 g(9);
  const Vector u = oracle::uniform(4, 1, g), y = oracle::uniform(8, 1, g);
  const ParamSolution sol = parameterize(data, u, y);
  const Matrix h = build_trajectory_matrix(data, 4);
  Vector w(12);
  w << u, y;
  // Oracle: residual of the projection onto im H via normal equations on
  // an LU-selected column basis.
  Eigen::FullPivLU<Matrix> lu(h);
  lu.setThreshold(1e-9);
  const Matrix basis = lu.image(h);
  const Vector proj = basis * (basis.transpose() * basis).ldlt().solve(basis.transpose() * w);
  EXPECT_NEAR(sol.residual_norm, (w - proj).norm(), 1e-9);
  EXPECT_NEAR(sol.relative_residual, sol.residual_norm / std::max(1.0, w.norm()), 1e-15);
}

TEST(Parameterize, RejectsMismatchedTargetLengths) {
  const LtiSystem s = benchmark();
  const TrajectorySet data =
      io_only(TrajectorySet({simulate(s, Vector::Zero(4), random_input(1, 30, -1, 1, 5))}));
  EXPECT_THROW(parameterize(data, Vector::Zero(3), Vector::Zero(4)), InputError);
  EXPECT_THROW(parameterize(data, Vector::Zero(40), Vector::Zero(80)), InputError);
}

TEST(Corollary1, BenchmarkWindowsFromUncontrollableStart) {
  const LtiSystem s = benchmark();
  Vector x0(4);
  x0 << 0, 0, 1, 0.2;
  const Trajectory run = simulate(s, x0, random_input(1, 80, -1, 1, 7)).without_states();
  Corollary1Options o;
  o.delta = 4;
  const Corollary1Report rep = check_corollary1(run, 25, 5, o);
  ASSERT_EQ(rep.verdict, Verdict::holds) << rep.diagnostic;
  EXPECT_EQ(rep.residuals.size(), 80u - 5u + 1u);
  EXPECT_LE(rep.max_residual, 1e-8);
}

TEST(Corollary1, GatedOnPrefixExcitation) {
  const LtiSystem s = benchmark();
  const Trajectory run = simulate(s, Vector::Zero(4), Matrix::Ones(1, 40)).without_states();
  Corollary1Options o;
  o.delta = 4;
  EXPECT_EQ(check_corollary1(run, 25, 5, o).verdict, Verdict::hypothesis_violated);
  o.delta = 0;
  EXPECT_THROW(check_corollary1(run, 25, 5, o), InputError);
}
