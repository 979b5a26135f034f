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

#include <sstream>

#include "oracles.hpp"
#include "willems/lti.hpp"
#include "willems/subspace.hpp"
#include "willems/trajectory_io.hpp"

using namespace willems;

TEST(LtiSystem, RejectsInconsistentDimensions) {
  EXPECT_THROW(LtiSystem(Matrix::Zero(2, 3), Matrix::Zero(2, 1), Matrix::Zero(1, 2), Matrix::Zero(1, 1)), InputError);
  EXPECT_THROW(LtiSystem(Matrix::Zero(2, 2), Matrix::Zero(3, 1), Matrix::Zero(1, 2), Matrix::Zero(1, 1)), InputError);
  EXPECT_THROW(LtiSystem(Matrix::Zero(2, 2), Matrix::Zero(2, 1), Matrix::Zero(1, 3), Matrix::Zero(1, 1)), InputError);
  EXPECT_THROW(LtiSystem(Matrix::Zero(2, 2), Matrix::Zero(2, 1), Matrix::Zero(1, 2), Matrix::Zero(2, 1)), InputError);
}

TEST(Simulate, MatchesDirectStepping) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomSystemRecipe r;
    r.n = 4;
    r.m = 2;
    r.p = 3;
    r.feedthrough = true;
    const LtiSystem s = random_system(r, seed);
    const Matrix u = random_input(2, 12, -1, 1, seed);
    const Vector x0 = Vector::LinSpaced(4, -1, 1);
    const Trajectory t = simulate(s, x0, u);
    Matrix x, y;
    oracle::step_response(s, x0, u, x, y);
    EXPECT_LT((t.states() - x).norm(), 1e-12);
    EXPECT_LT((t.outputs() - y).norm(), 1e-12);
    EXPECT_LT(dynamics_residual(s, t), 1e-14);
  }
}

TEST(Simulate, ScalarClosedForm) {
  // x+ = 0.5 x + u, u = 1, x0 = 0: x_t = 2 (1 - 0.5^t).
  const LtiSystem s(Matrix::Constant(1, 1, 0.5), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
  const Trajectory t = simulate(s, Vector::Zero(1), Matrix::Ones(1, 6));
  for (Index k = 0; k < 6; ++k) EXPECT_NEAR(t.outputs()(0, k), 2.0 * (1.0 - std::pow(0.5, k)), 1e-15);
}

TEST(RandomInput, DeterministicAndInRange) {
  const Matrix a = random_input(3, 50, -0.1, 0.2, 42);
  const Matrix b = random_input(3, 50, -0.1, 0.2, 42);
  EXPECT_EQ(a, b);
  EXPECT_GE(a.minCoeff(), -0.1);
  EXPECT_LT(a.maxCoeff(), 0.2);
  EXPECT_NE(a, random_input(3, 50, -0.1, 0.2, 43));
  EXPECT_THROW(random_input(1, 5, 1.0, 1.0, 0), InputError);
}

TEST(RandomSystem, StructuredSubspacesHaveRequestedDimensions) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomSystemRecipe r;
    r.n = 6;
    r.m = 2;
    r.p = 2;
    r.controllable_dim = 4;
    r.unobservable_dim = 1;
    const LtiSystem s = random_system(r, seed);
    EXPECT_EQ(oracle::lu_rank(oracle::controllability_matrix(s.A(), s.B())), 4);
    EXPECT_EQ(oracle::lu_kernel(oracle::observability_matrix(s.A(), s.C(), 6)).cols(), 1);
  }
}

TEST(RandomSystem, ScalarUncontrollableBlockLowersMinimalPolynomial) {
  RandomSystemRecipe r;
  r.n = 5;
  r.controllable_dim = 2;
  r.scalar_uncontrollable = true;
  const LtiSystem s = random_system(r, 9);
  EXPECT_EQ(oracle::minpoly_degree(s.A()), 3);
}

TEST(TrajectorySet, RejectsMixedDimensions) {
  Trajectory a(Matrix::Zero(1, 5), std::nullopt, Matrix::Zero(2, 5));
  Trajectory b(Matrix::Zero(2, 5), std::nullopt, Matrix::Zero(2, 5));
  EXPECT_THROW(TrajectorySet({a, b}), InputError);
  EXPECT_THROW(TrajectorySet(std::vector<Trajectory>{}), InputError);
  EXPECT_THROW(Trajectory(Matrix::Zero(1, 0), std::nullopt, std::nullopt), InputError);
}

TEST(Window, ExtractsAndValidates) {
  const Trajectory t(Matrix::Random(2, 10), Matrix::Random(3, 10), Matrix::Random(1, 10));
  const Trajectory w = window(t, 3, 4);
  EXPECT_EQ(w.length(), 4);
  EXPECT_EQ(w.inputs(), t.inputs().middleCols(3, 4));
  EXPECT_EQ(w.states(), t.states().middleCols(3, 4));
  EXPECT_THROW(window(t, 7, 4), InputError);
}

TEST(TrajectoryCsv, RoundTripsBitExactly) {
  const Trajectory t(Matrix::Random(2, 7) * 1e-3, Matrix::Random(3, 7) * 1e5, Matrix::Random(1, 7) / 3.0);
  std::istringstream is(trajectory_to_csv(t));
  const Trajectory back = read_trajectory_csv(is);
  EXPECT_EQ(back.inputs(), t.inputs());
  EXPECT_EQ(back.states(), t.states());
  EXPECT_EQ(back.outputs(), t.outputs());
}

TEST(TrajectoryCsv, HeaderLayout) {
  const Trajectory t(Matrix::Zero(1, 2), std::nullopt, Matrix::Zero(2, 2));
  const std::string csv = trajectory_to_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,u_0,y_0,y_1");
}

TEST(TrajectoryCsv, RejectsMalformed) {
  std::istringstream bad1("t,y_0,u_0\n0,1,2\n");
  EXPECT_THROW(read_trajectory_csv(bad1), InputError);
  std::istringstream bad2("t,u_0\n0,1\n2,1\n");
  EXPECT_THROW(read_trajectory_csv(bad2), InputError);
  std::istringstream bad3("t,u_0\n0,abc\n");
  EXPECT_THROW(read_trajectory_csv(bad3), InputError);
}

TEST(FormatReal, SeventeenSignificantDigits) {
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_real(1.0 / 3.0)), 1.0 / 3.0);
}
