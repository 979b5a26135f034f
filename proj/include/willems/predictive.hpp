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
#include <iosfwd>
#include <string>
#include <vector>

#include "willems/lti.hpp"
#include "willems/numerics.hpp"
#include "willems/qp.hpp"

namespace willems {

struct PredictiveConfig {
  Index past = 4;        // N
  Index horizon = 5;     // L
  Matrix Q;              // p x p, PSD
  Matrix R;              // m x m, PSD
  // p x 1 for a constant reference, otherwise p x (K + L + 1) with column
  // t holding r_t.
  Matrix reference;
  Vector u_min, u_max;   // empty = unbounded
  Vector y_min, y_max;   // empty = unbounded
  Index data_length = 25;  // T
  Index run_length = 80;   // K
  double excitation_low = -0.04;
  double excitation_high = 0.04;
  Vector x0;  // plant initial state; empty = zero
  // Minimal-polynomial bound used by the DeePC excitation gate (order
  // delta + N + L). 0 = use the plant's state dimension.
  Index delta = 0;
  double g_ridge = 0.0;
  QpSettings qp;

  // Throws InputError naming the offending field.
  void validate(Index m, Index p) const;
  Vector reference_at(Index t) const;
};

enum class StepStatus { optimal, infeasible, hypothesis_violated, solver_failure };

std::string_view to_string(StepStatus s);

struct StepResult {
  StepStatus status = StepStatus::solver_failure;
  Vector input;            // first planned input
  double objective = 0.0;  // sum_k ||ybar_k - r_k||_Q^2 + ||ubar_k||_R^2
  Matrix planned_inputs;   // m x L
  Matrix planned_outputs;  // p x L
  Vector g;                // DeePC only
  double solve_ms = 0.0;
  std::string diagnostic;
};

// Past measurements u_[0,t-1], y_[0,t-1] as an input-output trajectory of
// length t.
StepResult mpc_step(const LtiSystem& sys, const Trajectory& history,
                    const PredictiveConfig& cfg, Index t);

// `data` is the input-output trajectory whose Hankel matrices replace the
// model (the online prefix in the closed-loop harness).
StepResult deepc_step(const Trajectory& data, const Trajectory& history,
                      const PredictiveConfig& cfg, Index t);

enum class Controller { mpc, deepc };

std::string_view to_string(Controller c);

struct LogEntry {
  Index t = 0;
  bool control = false;  // false: excitation phase
  Vector u;
  Vector y;
  double objective = 0.0;  // NaN during excitation
  std::string status;
  double solve_ms = 0.0;
};

struct ClosedLoopLog {
  Controller controller = Controller::deepc;
  std::vector<LogEntry> entries;  // t = 0 .. K unless aborted
  Index excitation_attempts = 0;
  bool aborted = false;
  StepStatus abort_status = StepStatus::optimal;
  std::string abort_reason;
  Matrix reference;  // p x (K + 1), r_t per logged step

  Matrix inputs() const;
  Matrix outputs() const;
};

// Excites the plant on [0, T-1] with a seeded uniform input (redrawn until
// persistently exciting of order n + L + N, at most 100 draws), then
// applies the controller's first planned input at t = T, ..., K.
ClosedLoopLog run_closed_loop(const LtiSystem& sys, const PredictiveConfig& cfg,
                              Controller controller, std::uint64_t seed);

// Columns: t,phase,u_*,y_*,objective,status,solve_ms. With
// `record_timing` false the solve_ms column is written as 0.
std::string closed_loop_to_csv(const ClosedLoopLog& log, bool record_timing = true);
ClosedLoopLog read_closed_loop_csv(std::istream& is);

// Reference lines for plotting: t,r_0..r_{p-1}.
std::string reference_to_csv(const ClosedLoopLog& log);

}  // namespace willems
