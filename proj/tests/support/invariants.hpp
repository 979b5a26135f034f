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

// Randomized invariant suites shared by the property tests and the
// acceptance runner. Each returns the worst residual over its instances
// (or the number of violations for boolean properties).

#include <algorithm>
#include <cstdint>
#include <random>

#include "oracles.hpp"
#include "willems/hankel.hpp"
#include "willems/parameterize.hpp"
#include "willems/subspace.hpp"

namespace invariants {

using namespace willems;

struct SuiteResult {
  int instances = 0;
  double worst = 0.0;  // residual or violation count
};

inline RandomSystemRecipe random_recipe(std::mt19937_64& g) {
  std::uniform_int_distribution<int> nd(1, 6), md(1, 3);
  RandomSystemRecipe r;
  r.n = nd(g);
  r.m = md(g);
  r.p = md(g);
  r.controllable_dim = std::uniform_int_distribution<int>(0, static_cast<int>(r.n))(g);
  r.unobservable_dim = std::uniform_int_distribution<int>(0, static_cast<int>(r.controllable_dim))(g);
  r.scalar_uncontrollable = g() % 2 == 0;
  r.feedthrough = g() % 2 == 0;
  return r;
}

// Block row i + 1 of H_d(f) is block row i shifted left by one column.
inline SuiteResult hankel_shift(int count, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  SuiteResult res;
  for (int k = 0; k < count; ++k) {
    const Index q = 1 + static_cast<Index>(g() % 3), T = 5 + static_cast<Index>(g() % 20);
    const Index d = 1 + static_cast<Index>(g() % static_cast<std::uint64_t>(T));
    const Matrix f = oracle::uniform(q, T, g);
    const Matrix h = hankel(f, d);
    const Index cols = T - d + 1;
    for (Index i = 0; i + 1 < d && cols > 1; ++i) {
      const double diff = (h.block((i + 1) * q, 0, q, cols - 1) - h.block(i * q, 1, q, cols - 1))
                              .cwiseAbs().maxCoeff();
      res.worst = std::max(res.worst, diff);
    }
    if (h.cols() != cols || h.rows() != d * q) res.worst = std::max(res.worst, 1.0);
    ++res.instances;
  }
  return res;
}

// Persistently exciting of order d implies order d - 1. Counts violations.
inline SuiteResult pe_monotone(int count, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  SuiteResult res;
  for (int k = 0; k < count; ++k) {
    const Index m = 1 + static_cast<Index>(g() % 3);
    const Index T = 4 + static_cast<Index>(g() % 25);
    // Mix full-rank and low-rank input generators.
    Matrix u = oracle::uniform(m, T, g);
    if (g() % 2 == 0 && m > 1) u = oracle::uniform(m, 1, g) * oracle::uniform(1, T, g);
    if (g() % 4 == 0) {
      for (Index t = 0; t < T; ++t) u.col(t) = u.col(t % 3);
    }
    const TrajectorySet set({Trajectory(u, std::nullopt, std::nullopt)});
    bool prev = true;
    for (Index d = 1; d <= T; ++d) {
      const bool now = is_collectively_pe(set, d);
      if (now && !prev) res.worst += 1.0;
      prev = now;
    }
    ++res.instances;
  }
  return res;
}

// The unobservable subspace lies in ker O_L for every L.
inline SuiteResult unobservable_in_kernel(int count, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  SuiteResult res;
  for (int k = 0; k < count; ++k) {
    const LtiSystem s = random_system(random_recipe(g), g());
    const Index L = 1 + static_cast<Index>(g() % 6);
    const SubspaceBasis o = unobservable_subspace(s);
    if (o.dim() > 0) {
      const Matrix ol = response_operators(s, L).observability;
      res.worst = std::max(res.worst, (ol * o.basis()).norm() / std::max(1.0, ol.norm()));
    }
    ++res.instances;
  }
  return res;
}

// [0 I; O_L T_L] [H_1(x); H_L(u)] = [H_L(u); H_L(y)].
inline SuiteResult response_identity(int count, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  SuiteResult res;
  for (int k = 0; k < count; ++k) {
    const LtiSystem s = random_system(random_recipe(g), g());
    const Index L = 1 + static_cast<Index>(g() % 4);
    const Index T = L + 3 + static_cast<Index>(g() % 15);
    const Trajectory t = simulate(s, oracle::uniform(s.n(), 1, g), oracle::uniform(s.m(), T, g));
    const TrajectorySet set({t});
    const Matrix xu = state_input_data_matrix(set, L);
    const ResponseOperators ops = response_operators(s, L);
    const Index n = s.n(), m = s.m(), p = s.p();
    Matrix M = Matrix::Zero(L * (m + p), n + L * m);
    M.block(0, n, L * m, L * m) = Matrix::Identity(L * m, L * m);
    M.block(L * m, 0, L * p, n) = ops.observability;
    M.block(L * m, n, L * p, L * m) = ops.toeplitz;
    Matrix uy(L * (m + p), T - L + 1);
    uy << mosaic_hankel(set, L, Channel::inputs), mosaic_hankel(set, L, Channel::outputs);
    res.worst = std::max(res.worst, (M * xu - uy).norm() / std::max(1.0, uy.norm()));
    ++res.instances;
  }
  return res;
}

// A K[X0] is contained in K[X0].
inline SuiteResult krylov_invariance(int count, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  SuiteResult res;
  for (int k = 0; k < count; ++k) {
    const LtiSystem s = random_system(random_recipe(g), g());
    const Index cols = 1 + static_cast<Index>(g() % 3);
    Matrix x0 = oracle::uniform(s.n(), cols, g);
    // Often start inside an invariant subspace so K is proper.
    if (g() % 2 == 0) x0 = controllable_subspace(s).project(x0);
    const SubspaceBasis kx = krylov_subspace(s.A(), x0);
    if (kx.dim() > 0) {
      const Matrix ak = s.A() * kx.basis();
      res.worst = std::max(res.worst, (ak - kx.project(ak)).norm() / std::max(1.0, ak.norm()));
    }
    ++res.instances;
  }
  return res;
}

// x_t - A^t x_0 lies in the controllable subspace R.
inline SuiteResult reachability(int count, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  SuiteResult res;
  for (int k = 0; k < count; ++k) {
    const LtiSystem s = random_system(random_recipe(g), g());
    const Index T = 2 + static_cast<Index>(g() % 12);
    const Vector x0 = oracle::uniform(s.n(), 1, g);
    const Trajectory t = simulate(s, x0, oracle::uniform(s.m(), T, g));
    const SubspaceBasis r = controllable_subspace(s);
    Vector free = x0;
    for (Index i = 0; i < T; ++i) {
      const Vector forced = t.states().col(i) - free;
      const double scale = std::max(1.0, forced.norm());
      const Vector out = r.dim() ? Vector(forced - r.project(forced)) : forced;
      res.worst = std::max(res.worst, out.norm() / scale);
      free = s.A() * free;
    }
    ++res.instances;
  }
  return res;
}

}  // namespace invariants
