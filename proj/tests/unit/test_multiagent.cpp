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
#include "willems/multiagent.hpp"
#include "willems/subspace.hpp"

using namespace willems;

namespace {

Matrix abar_paper() {
  Matrix a(4, 4);
  a << 0.9964, 0.0026, -0.0004, -0.0460, 0.0045, 0.9037, -0.0188, -0.3834, 0.0098, 0.0339,
      0.9383, 0.1302, 0.0005, 0.0017, 0.0968, 1.0067;
  return a;
}

Matrix bbar_paper() {
  Matrix b(4, 2);
  b << 0.0445, 0.0167, 0.3407, -0.7249, -0.5278, 0.4214, -0.0268, 0.0215;
  return b;
}

}  // namespace

TEST(MultiAgentSpec, Validation) {
  MultiAgentSpec s{abar_paper(), bbar_paper(), 3, {{0, 1}, {0, 2}}};
  EXPECT_NO_THROW(s.validate());
  s.edges = {{0, 0}};
  EXPECT_THROW(s.validate(), InputError);
  s.edges = {{0, 3}};
  EXPECT_THROW(s.validate(), InputError);
  s.edges = {};
  s.Abar = Matrix::Identity(4, 4);
  s.Bbar = Matrix::Zero(4, 2);
  s.Bbar(0, 0) = 1.0;
  EXPECT_THROW(s.validate(), InputError);  // uncontrollable
}

TEST(BuildSystem, KroneckerStructure) {
  const MultiAgentSpec s{abar_paper(), bbar_paper(), 4, star_edges(4)};
  const LtiSystem sys = build_system(s);
  EXPECT_EQ(sys.n(), 16);
  EXPECT_EQ(sys.m(), 8);
  EXPECT_EQ(sys.p(), 12);
  EXPECT_EQ(sys.A(), oracle::kron(Matrix::Identity(4, 4), abar_paper()));
  EXPECT_EQ(sys.B(), oracle::kron(Matrix::Identity(4, 4), bbar_paper()));
  Matrix e(3, 4);
  e << 1, -1, 0, 0, 1, 0, -1, 0, 1, 0, 0, -1;
  EXPECT_EQ(incidence_matrix(s), e);
  EXPECT_EQ(sys.C(), oracle::kron(e, Matrix::Identity(4, 4)));
  EXPECT_EQ(sys.D().norm(), 0.0);
}

TEST(BuildSystem, SingleEdgeAndEdgeless) {
  const MultiAgentSpec two{abar_paper(), bbar_paper(), 2, {{0, 1}}};
  Matrix c(4, 8);
  c << Matrix::Identity(4, 4), -Matrix::Identity(4, 4);
  EXPECT_EQ(build_system(two).C(), c);
  const MultiAgentSpec one{abar_paper(), bbar_paper(), 1, {}};
  const LtiSystem sys = build_system(one);
  EXPECT_EQ(sys.p(), 0);
  EXPECT_EQ(sys.A(), abar_paper());
}

TEST(Markov, KroneckerIdentityOnKnownMatrices) {
  const MultiAgentSpec s{abar_paper(), bbar_paper(), 3, star_edges(3)};
  const MarkovParams direct = markov_parameters(build_system(s), 5);
  const MarkovParams kron = kronecker_markov(s, 5);
  for (Index k = 0; k <= 5; ++k) {
    EXPECT_LT((direct.M[static_cast<size_t>(k)] - kron.M[static_cast<size_t>(k)]).norm(), 1e-14) << k;
  }
}

TEST(MarkovFromData, FirstParameterIsCB) {
  RandomSystemRecipe r;
  r.n = 3;
  r.m = 2;
  r.p = 2;
  const LtiSystem s = random_system(r, 5);
  const TrajectorySet data({simulate(s, Vector::Zero(3), random_input(2, 40, -1, 1, 1))});
  MarkovOptions o;
  o.state_dim = 3;
  o.delta = 3;
  o.kmax = 3;
  const MarkovResult res = markov_from_data(data, o);
  ASSERT_EQ(res.verdict, Verdict::holds) << res.diagnostic;
  EXPECT_LT(res.params.M[0].norm(), 1e-10);
  const MarkovParams truth = markov_parameters(s, 3);
  for (Index k = 1; k <= 3; ++k) {
    EXPECT_LT((res.params.M[static_cast<size_t>(k)] - truth.M[static_cast<size_t>(k)]).norm(), 1e-9);
  }
}

TEST(MarkovFromData, RecoversFeedthroughAsM0) {
  RandomSystemRecipe r;
  r.n = 3;
  r.m = 1;
  r.p = 2;
  r.feedthrough = true;
  const LtiSystem s = random_system(r, 8);
  const TrajectorySet data({simulate(s, Vector::Zero(3), random_input(1, 40, -1, 1, 2))});
  MarkovOptions o;
  o.state_dim = 3;
  o.delta = 3;
  o.kmax = 2;
  const MarkovResult res = markov_from_data(data, o);
  ASSERT_EQ(res.verdict, Verdict::holds);
  EXPECT_LT((res.params.M[0] - s.D()).norm(), 1e-9);
}

TEST(MarkovFromData, HypothesisGate) {
  const MultiAgentSpec s{abar_paper(), bbar_paper(), 3, star_edges(3)};
  const LtiSystem sys = build_system(s);
  // T = 40 is far too short for order 17 with m = 6.
  const TrajectorySet data = generate_data(sys, 1, 40, -0.1, 0.1, 3);
  MarkovOptions o;
  o.state_dim = 12;
  o.delta = 4;
  o.kmax = 5;
  const MarkovResult res = markov_from_data(data, o);
  EXPECT_EQ(res.verdict, Verdict::hypothesis_violated);
  EXPECT_EQ(res.required_pe_order, 17);
}

TEST(MarkovFromData, CorruptedSampleFailsConsistency) {
  const MultiAgentSpec s{abar_paper(), bbar_paper(), 3, star_edges(3)};
  const LtiSystem sys = build_system(s);
  const TrajectorySet clean = generate_data(sys, 1, 120, -0.1, 0.1, 3);
  Matrix y = clean[0].outputs();
  y(2, 60) += 0.05;
  const TrajectorySet dirty({Trajectory(clean[0].inputs(), std::nullopt, y)});
  MarkovOptions o;
  o.state_dim = 12;
  o.delta = 4;
  o.kmax = 5;
  EXPECT_NO_THROW(markov_from_data(clean, o));
  try {
    markov_from_data(dirty, o);
    FAIL() << "corruption not detected";
  } catch (const NumericalError& e) {
    EXPECT_GT(e.residual(), o.tol);
  }
}

TEST(RecoverSystem, IdentityAgentsSingleEdge) {
  const MultiAgentSpec s{Matrix::Identity(2, 2), Matrix::Identity(2, 2), 2, {{0, 1}}};
  const MarkovParams mp = kronecker_markov(s, 3);
  const RecoveredSystem r = recover_system(mp, {0, 0, 1}, 2, 2);
  EXPECT_LT((r.Abar_hat - Matrix::Identity(2, 2)).norm(), 1e-14);
  EXPECT_LT((r.Bbar_hat - Matrix::Identity(2, 2)).norm(), 1e-14);
  Matrix e(1, 2);
  e << 1, -1;
  EXPECT_EQ(r.E_hat, e);
}

TEST(RecoverSystem, NegativeAnchorGivesSameRecovery) {
  const MultiAgentSpec s{abar_paper(), bbar_paper(), 4, star_edges(4)};
  const MarkovParams mp = kronecker_markov(s, 5);
  const RecoveredSystem pos = recover_system(mp, {1, 0, 1}, 4, 2);
  const RecoveredSystem neg = recover_system(mp, {1, 2, -1}, 4, 2);
  EXPECT_LT((pos.Abar_hat - neg.Abar_hat).norm(), 1e-12);
  EXPECT_LT((pos.Bbar_hat - neg.Bbar_hat).norm(), 1e-14);
  EXPECT_EQ(pos.E_hat, neg.E_hat);
  EXPECT_EQ(pos.E_hat, incidence_matrix(s));
  EXPECT_LT((pos.Abar_hat - abar_paper()).norm(), 1e-10);
}

TEST(RecoverSystem, Errors) {
  const MultiAgentSpec s{abar_paper(), bbar_paper(), 3, star_edges(3)};
  EXPECT_THROW(recover_system(kronecker_markov(s, 4), {0, 0, 1}, 4, 2), InputError);
  // Anchor on a zero entry of E.
  EXPECT_THROW(recover_system(kronecker_markov(s, 5), {0, 2, 1}, 4, 2), InputError);
  // Bbar spans an Abar-invariant line, so the stacked blocks have rank 1.
  const MultiAgentSpec line{Matrix::Identity(2, 2), Matrix::Identity(2, 1), 2, {{0, 1}}};
  EXPECT_THROW(recover_system(kronecker_markov(line, 3), {0, 0, 1}, 2, 1), NumericalError);
  // A block that is neither 0 nor +-Bbar.
  MarkovParams amb = kronecker_markov(s, 5);
  amb.M[1].block(0, 2, 4, 2) *= 0.5;
  EXPECT_THROW(recover_system(amb, {0, 0, 1}, 4, 2), NumericalError);
}

TEST(Bounds, ArithmeticInstances) {
  EXPECT_EQ(rule_pe_order(OrderRule::corollary2, 3, 4), 17);
  EXPECT_EQ(rule_pe_order(OrderRule::full_n, 3, 4), 25);
  EXPECT_EQ(analytic_trajectory_bound(OrderRule::corollary2, 3, 4, 2, 120), 1);  // 102 / 104
  EXPECT_EQ(analytic_trajectory_bound(OrderRule::full_n, 3, 4, 2, 120), 2);      // 150 / 96
  for (Index N = 3; N <= 14; ++N) {
    const Index c2 = (8 * N * N + 10 * N + (116 - 4 * N) - 1) / (116 - 4 * N);
    const Index fn = (16 * N * N + 2 * N + (120 - 8 * N) - 1) / (120 - 8 * N);
    EXPECT_EQ(analytic_trajectory_bound(OrderRule::corollary2, N, 4, 2, 120), c2) << N;
    EXPECT_EQ(analytic_trajectory_bound(OrderRule::full_n, N, 4, 2, 120), fn) << N;
  }
  EXPECT_EQ(analytic_trajectory_bound(OrderRule::full_n, 15, 4, 2, 120), -1);
}

TEST(Sweep, SmallRangeMatchesBoundsAndRoundTrips) {
  const std::vector<SweepRow> rows =
      min_trajectory_sweep(abar_paper(), bbar_paper(), {3, 4}, OrderRule::full_n, 5);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].tau_min, 2);
  EXPECT_EQ(rows[1].tau_min, 3);
  std::istringstream is(sweep_to_csv(rows));
  const auto back = read_sweep_csv(is);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].tau_min, 3);
  EXPECT_EQ(back[1].pe_order, 33);
  EXPECT_EQ(back[1].elapsed_ms, rows[1].elapsed_ms);
}

TEST(Sweep, InfeasibleOrderReported) {
  SweepOptions o;
  o.length = 30;
  const auto rows = min_trajectory_sweep(abar_paper(), bbar_paper(), {4}, OrderRule::full_n, 0, o);
  EXPECT_EQ(rows[0].tau_min, -1);
  EXPECT_EQ(rows[0].analytic_bound, -1);
}

TEST(IdentifyNetwork, EndToEnd) {
  const MultiAgentSpec s{abar_paper(), bbar_paper(), 4, star_edges(4)};
  const IdentificationReport rep = identify_network(s, {0, 1, -1}, 2, SweepOptions{}, 11);
  ASSERT_EQ(rep.verdict, Verdict::holds) << rep.diagnostic;
  EXPECT_LE(rep.abar_error, 1e-6);
  EXPECT_LE(rep.bbar_error, 1e-6);
  EXPECT_EQ(rep.e_error, 0.0);
  ASSERT_EQ(rep.markov_errors.size(), 5u);
}
