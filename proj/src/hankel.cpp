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

#include "willems/hankel.hpp"

#include <algorithm>
#include <limits>

namespace willems {

const Matrix& channel_of(const Trajectory& traj, Channel ch) {
  switch (ch) {
    case Channel::inputs:
      return traj.inputs();
    case Channel::states:
      return traj.states();
    case Channel::outputs:
      return traj.outputs();
  }
  throw InputError("unknown channel");
}

Matrix hankel(const Matrix& signal, Index depth) {
  const Index q = signal.rows();
  const Index T = signal.cols();
  if (depth < 1 || depth > T) {
    throw InputError("hankel: depth " + std::to_string(depth) +
                     " outside [1, " + std::to_string(T) + "]");
  }
  const Index cols = T - depth + 1;
  Matrix h(depth * q, cols);
  for (Index i = 0; i < depth; ++i) {
    h.middleRows(i * q, q) = signal.middleCols(i, cols);
  }
  return h;
}

Matrix mosaic_hankel(const TrajectorySet& set, Index depth, Channel ch) {
  Index total = 0;
  for (Index i = 0; i < set.size(); ++i) {
    const Index T = set[i].length();
    if (T < depth) {
      throw InputError("mosaic_hankel: trajectory " + std::to_string(i) +
                       " has length " + std::to_string(T) + " < depth " +
                       std::to_string(depth));
    }
    total += T - depth + 1;
  }
  const Index q = channel_of(set[0], ch).rows();
  Matrix out(depth * q, total);
  Index col = 0;
  for (const Trajectory& traj : set) {
    const Matrix block = hankel(channel_of(traj, ch), depth);
    out.middleCols(col, block.cols()) = block;
    col += block.cols();
  }
  return out;
}

PeCheck check_collective_pe(const TrajectorySet& set, Index depth,
                            const RankTolerance& tol) {
  PeCheck out;
  if (depth < 1) {
    out.diagnostic = "order must be positive";
    return out;
  }
  for (Index i = 0; i < set.size(); ++i) {
    if (set[i].length() < depth) {
      out.diagnostic = "trajectory " + std::to_string(i) + " has length " +
                       std::to_string(set[i].length()) + " < order " +
                       std::to_string(depth);
      return out;
    }
  }
  const Matrix h = mosaic_hankel(set, depth, Channel::inputs);
  out.rows = h.rows();
  out.cols = h.cols();
  // Full row rank is impossible with fewer columns than rows.
  if (h.cols() < h.rows()) {
    out.diagnostic = "mosaic-Hankel matrix has fewer columns than rows";
    return out;
  }
  out.rank = numerical_rank(h, tol);
  out.exciting = out.rank == h.rows();
  return out;
}

bool is_collectively_pe(const TrajectorySet& set, Index depth,
                        const RankTolerance& tol) {
  return check_collective_pe(set, depth, tol).exciting;
}

Index pe_order(const TrajectorySet& set, const RankTolerance& tol) {
  Index bound = std::numeric_limits<Index>::max();
  for (const Trajectory& t : set) bound = std::min(bound, t.length());
  for (Index d = bound; d >= 1; --d) {
    if (is_collectively_pe(set, d, tol)) return d;
  }
  return 0;
}

}  // namespace willems
