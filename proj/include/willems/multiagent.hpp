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
#include <string>
#include <utility>
#include <vector>

#include "willems/lti.hpp"
#include "willems/numerics.hpp"

namespace willems {

// Homogeneous network: N agents x+ = Abar x + Bbar u, outputs are relative
// states along directed edges (head minus tail).
struct MultiAgentSpec {
  Matrix Abar;
  Matrix Bbar;
  Index agents = 1;
  std::vector<std::pair<Index, Index>> edges;  // (head, tail), 0-based

  Index nbar() const { return Abar.rows(); }
  Index mbar() const { return Bbar.cols(); }

  // Throws InputError on bad dimensions, invalid edges, or an
  // uncontrollable agent pair.
  void validate() const;
};

// Edge 0 .. N-2 runs from agent 0 to agent i + 1.
std::vector<std::pair<Index, Index>> star_edges(Index agents);

// M x N, row e has +1 at the head and -1 at the tail of edge e.
Matrix incidence_matrix(const MultiAgentSpec& spec);

// A = I_N (x) Abar, B = I_N (x) Bbar, C = E (x) I, D = 0.
LtiSystem build_system(const MultiAgentSpec& spec);

struct MarkovParams {
  std::vector<Matrix> M;  // M[k] for k = 0 .. kmax (M[0] = D)

  Index kmax() const { return static_cast<Index>(M.size()) - 1; }
  // Block (i, j) of M_k, of size rows x cols.
  Matrix block(Index k, Index i, Index j, Index rows, Index cols) const;
};

// C A^{k-1} B for k >= 1, D for k = 0.
MarkovParams markov_parameters(const LtiSystem& sys, Index kmax);

// E (x) (Abar^{k-1} Bbar) for k >= 1, zero for k = 0.
MarkovParams kronecker_markov(const MultiAgentSpec& spec, Index kmax);

struct MarkovOptions {
  Index state_dim = 0;  // n
  Index delta = 0;      // minimal-polynomial bound; excitation order delta + n + 1
  Index kmax = 0;
  // Bound on the part of the final output row block not explained by the
  // rows that determine it, relative to its norm.
  double tol = 1e-6;
  RankTolerance rank_tol = RankTolerance(1e-10);
};

struct MarkovResult {
  Verdict verdict = Verdict::hypothesis_violated;  // fails is never set
  MarkovParams params;
  double consistency_residual = 0.0;
  Index required_pe_order = 0;
  std::string diagnostic;
};

// Impulse-response parameters from input-output data: for each k the data
// matrix of depth n + 1 is solved (minimum norm) on its input rows and
// first n output samples against an input impulse at time n - k preceded
// by a zero response, with the already known M_0 .. M_{k-1} in place; the
// last output sample gives M_k. Throws NumericalError when the last output
// rows are not determined by the others within `tol`.
MarkovResult markov_from_data(const TrajectorySet& data, const MarkovOptions& opts);

struct Anchor {
  Index edge = 0;   // row block i of E
  Index agent = 0;  // column block j of E
  int sign = 1;     // known value of E(i, j)
};

struct RecoveredSystem {
  Matrix Abar_hat;
  Matrix Bbar_hat;
  Matrix E_hat;
  Anchor anchor;
  Index stack_rank = 0;
};

// Bbar = sign (M_1)_ij, Abar from Abar [(M_1)_ij .. (M_nbar)_ij] =
// [(M_2)_ij .. (M_{nbar+1})_ij], E by comparing each block of M_1 with
// +-Bbar. Blocks with norm <= 1e-6 ||Bbar|| are zero; `tol` bounds the
// relative mismatch of a nonzero block.
RecoveredSystem recover_system(const MarkovParams& params, const Anchor& anchor, Index nbar,
                               Index mbar, double tol = 1e-6);

enum class OrderRule { corollary2, full_n };

std::string_view to_string(OrderRule r);
OrderRule order_rule_from_string(std::string_view s);

// (N + 1) nbar + 1 or 2 N nbar + 1.
Index rule_pe_order(OrderRule rule, Index agents, Index nbar);

// ceil(d m / (T - d + 1)) for excitation order d and m = N mbar inputs;
// -1 when T - d + 1 < 1.
Index analytic_trajectory_bound(OrderRule rule, Index agents, Index nbar, Index mbar,
                                Index length);

// Seed of trajectory i within a set drawn from `seed`.
std::uint64_t trajectory_seed(std::uint64_t seed, Index i);

// tau trajectories of length T from x0 = 0 with inputs uniform on
// [low, high]; trajectory i uses trajectory_seed(seed, i).
TrajectorySet generate_data(const LtiSystem& sys, Index tau, Index length, double low,
                            double high, std::uint64_t seed);

struct SweepOptions {
  Index length = 120;
  double input_low = -0.1;
  double input_high = 0.1;
  Index max_extra = 50;  // give up this many trajectories past the bound
  double state_warning = 1e6;
};

struct SweepRow {
  Index agents = 0;
  OrderRule rule = OrderRule::corollary2;
  Index tau_min = -1;  // -1: infeasible
  Index analytic_bound = -1;
  Index pe_order = 0;
  double elapsed_ms = 0.0;
  std::string warning;
};

// Smallest tau (searched upward from the analytic bound) for which tau
// seeded trajectories are collectively persistently exciting at the rule's
// order, for a star network of each agent count.
std::vector<SweepRow> min_trajectory_sweep(const Matrix& Abar, const Matrix& Bbar,
                                           const std::vector<Index>& agent_counts,
                                           OrderRule rule, std::uint64_t seed,
                                           const SweepOptions& opts = {});

// Columns: N,rule,tau_min,analytic_bound,pe_order,elapsed_ms.
std::string sweep_to_csv(const std::vector<SweepRow>& rows, bool record_timing = true);
std::vector<SweepRow> read_sweep_csv(std::istream& is);

struct IdentificationReport {
  Verdict verdict = Verdict::hypothesis_violated;
  Index trajectories = 0;
  std::vector<double> markov_errors;  // Frobenius, k = 1 .. nbar + 1
  double consistency_residual = 0.0;
  double abar_error = 0.0;
  double bbar_error = 0.0;
  double e_error = 0.0;
  RecoveredSystem recovered;
  std::string diagnostic;
};

// Generates tau trajectories from the network, computes M_0 .. M_{nbar+1}
// from data with delta = nbar and recovers the agent model, comparing
// against the ground truth. `anchor` must name a nonzero entry of E.
IdentificationReport identify_network(const MultiAgentSpec& spec, const Anchor& anchor,
                                      Index tau, const SweepOptions& data_opts,
                                      std::uint64_t seed, double tol = 1e-6);

}  // namespace willems
