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

#include "willems/parameterize.hpp"

#include <algorithm>

#include "willems/hankel.hpp"

namespace willems {

Matrix build_trajectory_matrix(const TrajectorySet& data, Index horizon) {
  if (!data.has_outputs()) throw InputError("build_trajectory_matrix: data carries no outputs");
  const Matrix hu = mosaic_hankel(data, horizon, Channel::inputs);
  const Matrix hy = mosaic_hankel(data, horizon, Channel::outputs);
  Matrix stacked(hu.rows() + hy.rows(), hu.cols());
  stacked << hu, hy;
  return stacked;
}

Vector stack_samples(const Matrix& signal) { return signal.reshaped(); }

Matrix unstack_samples(const Vector& stacked, Index channels) {
  if (channels == 0) return Matrix(0, 0);
  if (stacked.size() % channels != 0) {
    throw InputError("unstack_samples: length is not a multiple of the channel count");
  }
  return stacked.reshaped(channels, stacked.size() / channels);
}

ParamSolution parameterize(const TrajectorySet& data, const Vector& target_u,
                           const Vector& target_y, double threshold) {
  const Index m = data.m();
  const Index p = data.p();
  if (m == 0 || target_u.size() % m != 0 || target_u.size() == 0) {
    throw InputError("parameterize: target input length " + std::to_string(target_u.size()) +
                     " is not a positive multiple of m = " + std::to_string(m));
  }
  const Index horizon = target_u.size() / m;
  if (target_y.size() != p * horizon) {
    throw InputError("parameterize: target output length " + std::to_string(target_y.size()) +
                     " does not equal p*L = " + std::to_string(p * horizon));
  }
  const Matrix h = build_trajectory_matrix(data, horizon);
  Vector target(target_u.size() + target_y.size());
  target << target_u, target_y;

  const LeastSquaresResult ls = least_squares(h, target);
  ParamSolution out;
  out.g = ls.solution.col(0);
  out.residual_norm = ls.residual_norm;
  out.relative_residual = ls.residual_norm / std::max(1.0, target.norm());
  out.parameterizable = out.relative_residual <= threshold;
  return out;
}

ParamSolution parameterize(const TrajectorySet& data, const Trajectory& target,
                           double threshold) {
  return parameterize(data, stack_samples(target.inputs()), stack_samples(target.outputs()),
                      threshold);
}

Vector reconstruct_state(const TrajectorySet& data, const Vector& g, Index horizon) {
  if (!data.has_states()) throw InputError("reconstruct_state: data carries no states");
  Index cols = 0;
  for (const Trajectory& t : data) cols += t.length() - horizon + 1;
  if (g.size() != cols) {
    throw InputError("reconstruct_state: g has length " + std::to_string(g.size()) +
                     ", expected " + std::to_string(cols));
  }
  Vector x0 = Vector::Zero(data.n());
  Index offset = 0;
  for (const Trajectory& t : data) {
    const Index c = t.length() - horizon + 1;
    x0 += t.states().leftCols(c) * g.segment(offset, c);
    offset += c;
  }
  return x0;
}

ResponseOperators response_operators(const LtiSystem& sys, Index horizon) {
  if (horizon < 1) throw InputError("response_operators: L must be positive");
  const Index n = sys.n(), m = sys.m(), p = sys.p();
  ResponseOperators ops;
  ops.observability.resize(horizon * p, n);
  ops.toeplitz = Matrix::Zero(horizon * p, horizon * m);

  // markov[k] = C A^{k-1} B for k >= 1.
  std::vector<Matrix> markov(static_cast<size_t>(horizon));
  Matrix c_pow = sys.C();
  for (Index k = 0; k < horizon; ++k) {
    ops.observability.middleRows(k * p, p) = c_pow;
    if (k + 1 < horizon) markov[static_cast<size_t>(k + 1)] = c_pow * sys.B();
    c_pow = c_pow * sys.A();
  }
  for (Index i = 0; i < horizon; ++i) {
    ops.toeplitz.block(i * p, i * m, p, m) = sys.D();
    for (Index j = 0; j < i; ++j) {
      ops.toeplitz.block(i * p, j * m, p, m) = markov[static_cast<size_t>(i - j)];
    }
  }
  return ops;
}

Corollary1Report check_corollary1(const Trajectory& run, Index prefix_length,
                                  Index horizon, const Corollary1Options& opts) {
  const Index K = run.length();
  if (!(horizon >= 1 && horizon <= prefix_length && prefix_length <= K)) {
    throw InputError("check_corollary1: requires 1 <= L <= T <= K (L = " +
                     std::to_string(horizon) + ", T = " + std::to_string(prefix_length) +
                     ", K = " + std::to_string(K) + ")");
  }
  if (opts.delta < 1) throw InputError("check_corollary1: delta must be positive");
  if (!run.has_outputs()) throw InputError("check_corollary1: run carries no outputs");

  Corollary1Report report;
  report.required_pe_order = opts.delta + horizon;
  const TrajectorySet prefix({window(run, 0, prefix_length).without_states()});
  const PeCheck pe = check_collective_pe(prefix, report.required_pe_order, opts.rank_tol);
  if (!pe.exciting) {
    report.diagnostic = pe.diagnostic.empty()
                            ? "prefix input is not persistently exciting of order " +
                                  std::to_string(report.required_pe_order)
                            : pe.diagnostic;
    return report;
  }

  const Matrix h = build_trajectory_matrix(prefix, horizon);
  Matrix targets(h.rows(), K - horizon + 1);
  for (Index t = 0; t + horizon <= K; ++t) {
    targets.col(t) << stack_samples(run.inputs().middleCols(t, horizon)),
        stack_samples(run.outputs().middleCols(t, horizon));
  }
  // One factorization serves every window; columns are solved independently.
  const LeastSquaresResult ls = least_squares(h, targets);
  const Matrix residual = h * ls.solution - targets;
  report.residuals.resize(static_cast<size_t>(targets.cols()));
  bool all = true;
  for (Index t = 0; t < targets.cols(); ++t) {
    const double rel = residual.col(t).norm() / std::max(1.0, targets.col(t).norm());
    report.residuals[static_cast<size_t>(t)] = rel;
    report.max_residual = std::max(report.max_residual, rel);
    all = all && rel <= opts.threshold;
  }
  report.verdict = all ? Verdict::holds : Verdict::fails;
  return report;
}

}  // namespace willems
