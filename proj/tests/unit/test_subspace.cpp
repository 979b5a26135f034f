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

Vector unit(Index n, Index i) {
  Vector e = Vector::Zero(n);
  e[i] = 1.0;
  return e;
}

}  // namespace

TEST(Krylov, MatchesExplicitPowers) {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 30; ++trial) {
    RandomSystemRecipe r;
    r.n = 6;
    r.m = 1 + trial % 2;
    r.controllable_dim = trial % 7;
    const LtiSystem s = random_system(r, static_cast<std::uint64_t>(trial));
    const SubspaceBasis k = controllable_subspace(s);
    const Matrix ctrb = oracle::controllability_matrix(s.A(), s.B());
    EXPECT_EQ(k.dim(), oracle::lu_rank(ctrb)) << trial;
    if (k.dim() > 0) EXPECT_TRUE(oracle::same_span(k.basis(), ctrb)) << trial;
  }
}

TEST(Krylov, BenchmarkSubspaces) {
  const LtiSystem s = benchmark();
  const SubspaceBasis r = controllable_subspace(s);
  EXPECT_EQ(r.dim(), 2);
  EXPECT_TRUE(subspace_contains(r, unit(4, 0)));
  EXPECT_TRUE(subspace_contains(r, unit(4, 1)));
  EXPECT_EQ(unobservable_subspace(s).dim(), 0);
  // A e3 = 0.9 e3: the Krylov space of e3 is span{e3}.
  EXPECT_EQ(krylov_subspace(s.A(), unit(4, 2)).dim(), 1);
  // e4 pulls in e3.
  const SubspaceBasis k4 = krylov_subspace(s.A(), unit(4, 3));
  EXPECT_EQ(k4.dim(), 2);
  EXPECT_TRUE(subspace_contains(k4, unit(4, 2)));
}

TEST(Krylov, ZeroStartIsZeroSpace) {
  EXPECT_EQ(krylov_subspace(Matrix::Identity(3, 3), Matrix::Zero(3, 2)).dim(), 0);
}

TEST(Unobservable, MatchesObservabilityKernel) {
  for (int trial = 0; trial < 30; ++trial) {
    RandomSystemRecipe r;
    r.n = 5;
    r.p = 1 + trial % 2;
    r.unobservable_dim = trial % 4;
    const LtiSystem s = random_system(r, static_cast<std::uint64_t>(100 + trial));
    const Matrix obs = oracle::observability_matrix(s.A(), s.C(), 5);
    const Matrix ker = oracle::lu_kernel(obs);
    const SubspaceBasis o = unobservable_subspace(s);
    ASSERT_EQ(o.dim(), ker.cols()) << trial;
    if (o.dim() > 0) EXPECT_TRUE(oracle::same_span(o.basis(), ker));
    // O_L annihilates the unobservable subspace.
    if (o.dim() > 0) EXPECT_LT((obs * o.basis()).norm(), 1e-10);
  }
}

TEST(MinPoly, KnownMatrices) {
  EXPECT_EQ(min_poly_degree(Matrix::Identity(4, 4)).delta_min, 1);
  EXPECT_EQ(min_poly_degree(Matrix::Zero(3, 3)).delta_min, 1);
  Matrix jordan = Matrix::Identity(3, 3) * 2.0;
  jordan(0, 1) = 1.0;
  EXPECT_EQ(min_poly_degree(jordan).delta_min, 2);
  EXPECT_EQ(min_poly_degree(benchmark().A()).delta_min, 4);
  Matrix diag = Vector::LinSpaced(5, 0.1, 0.9).asDiagonal();
  EXPECT_EQ(min_poly_degree(diag).delta_min, 5);
  Matrix rep(4, 4);
  rep.setZero();
  rep.diagonal() << 0.5, 0.5, -0.3, -0.3;
  EXPECT_EQ(min_poly_degree(rep).delta_min, 2);
}

TEST(MinPoly, KroneckerBlockDiagonal) {
  std::mt19937_64 g(7);
  const Matrix abar = oracle::uniform(3, 3, g);
  for (Index N = 1; N <= 4; ++N) {
    const Matrix a = oracle::kron(Matrix::Identity(N, N), abar);
    EXPECT_EQ(min_poly_degree(a).delta_min, 3) << N;
  }
}

TEST(MinPoly, AgreesWithLuOracle) {
  for (int trial = 0; trial < 30; ++trial) {
    RandomSystemRecipe r;
    r.n = 5;
    r.controllable_dim = trial % 6;
    r.scalar_uncontrollable = trial % 2 == 0;
    const LtiSystem s = random_system(r, static_cast<std::uint64_t>(200 + trial));
    EXPECT_EQ(min_poly_degree(s.A()).delta_min, oracle::minpoly_degree(s.A())) << trial;
  }
}

TEST(ImageCheck, GatesOnExcitation) {
  const LtiSystem s = benchmark();
  // A constant input is exciting of order 1 only.
  const TrajectorySet data({simulate(s, Vector::Zero(4), Matrix::Ones(1, 30))});
  const ImageCheckReport rep = theorem1_image_check(s, data, 2);
  EXPECT_EQ(rep.verdict, Verdict::hypothesis_violated);
  EXPECT_EQ(rep.required_pe_order, 6);
}

TEST(ImageCheck, BenchmarkHoldsFromZeroAndFromUncontrollableState) {
  const LtiSystem s = benchmark();
  const Matrix u = random_input(1, 40, -1, 1, 3);
  const ImageCheckReport zero = theorem1_image_check(s, TrajectorySet({simulate(s, Vector::Zero(4), u)}), 5);
  EXPECT_EQ(zero.verdict, Verdict::holds);
  EXPECT_EQ(zero.target_dim, 2 + 5);
  const ImageCheckReport e4 = theorem1_image_check(s, TrajectorySet({simulate(s, unit(4, 3), u)}), 5);
  EXPECT_EQ(e4.verdict, Verdict::holds);
  EXPECT_EQ(e4.target_dim, 4 + 5);
  EXPECT_LE(e4.residual, 1e-8);
}

TEST(StateCondition, BenchmarkExamples) {
  const LtiSystem s = benchmark();
  const Matrix u = random_input(1, 40, -1, 1, 4);
  const TrajectorySet zero({simulate(s, Vector::Zero(4), u)});
  EXPECT_FALSE(theorem1_state_condition(s, zero, unit(4, 2)));
  EXPECT_TRUE(theorem1_state_condition(s, zero, unit(4, 0) + unit(4, 1)));
  const TrajectorySet from_e3({simulate(s, unit(4, 2), u)});
  EXPECT_TRUE(theorem1_state_condition(s, from_e3, unit(4, 2)));
  EXPECT_FALSE(theorem1_state_condition(s, from_e3, unit(4, 3)));
  EXPECT_THROW(theorem1_state_condition(s, zero, Vector::Zero(3)), InputError);
}
