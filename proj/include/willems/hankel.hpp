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

#include <string>

#include "willems/lti.hpp"
#include "willems/numerics.hpp"

namespace willems {

enum class Channel { inputs, states, outputs };

const Matrix& channel_of(const Trajectory& traj, Channel ch);

// Depth-d block Hankel matrix of a q x T signal: block (i, j) is f_{i+j},
// size (d q) x (T - d + 1).
Matrix hankel(const Matrix& signal, Index depth);

// [H_d(f^1) ... H_d(f^tau)] for one channel of every trajectory.
Matrix mosaic_hankel(const TrajectorySet& set, Index depth, Channel ch);

struct PeCheck {
  bool exciting = false;
  Index rank = 0;
  Index rows = 0;
  Index cols = 0;
  std::string diagnostic;  // set when some trajectory is shorter than d
};

// Collective persistency of excitation of order d: every trajectory has
// length >= d and the depth-d input mosaic-Hankel matrix has full row rank.
PeCheck check_collective_pe(const TrajectorySet& set, Index depth,
                            const RankTolerance& tol = {});
bool is_collectively_pe(const TrajectorySet& set, Index depth,
                        const RankTolerance& tol = {});

// Largest d for which the set is collectively persistently exciting; 0
// when there is none.
Index pe_order(const TrajectorySet& set, const RankTolerance& tol = {});

}  // namespace willems
