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

#include "willems/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "willems/hankel.hpp"

namespace willems {

namespace {

constexpr double kKrylovGrowthTolerance = 1e-12;

// New orthonormal directions of w (already orthogonalized against the
// current basis) whose singular values exceed `threshold`.
Matrix fresh_directions(const Matrix& w, double threshold) {
  if (w.cols() == 0) return Matrix(w.rows(), 0);
  Eigen::BDCSVD<Matrix> svd(w, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  Index r = 0;
  while (r < sv.size() && sv[r] > threshold) ++r;
  return svd.matrixU().leftCols(r);
}

}  // namespace

SubspaceBasis krylov_subspace(const Matrix& a, const Matrix& x0,
                              const RankTolerance& tol) {
  const Index n = a.rows();
  if (a.cols() != n) throw InputError("krylov_subspace: A is not square");
  if (x0.rows() != n) {
    throw InputError("krylov_subspace: X0 has " + std::to_string(x0.rows()) +
                     " rows, A is " + std::to_string(n) + "x" + std::to_string(n));
  }
  require_finite(a, "krylov_subspace(A)");
  require_finite(x0, "krylov_subspace(X0)");

  Matrix basis = orthonormal_image(x0, tol);
  if (basis.cols() == 0) return SubspaceBasis::zero(n);

  // A acts on unit vectors, so fresh directions are measured against ||A||.
  // Without an explicit factor the cutoff sits well above the round-off
  // left by reorthogonalization.
  const double a_norm = a.size() > 0 ? a.operatorNorm() : 0.0;
  const double threshold =
      tol.relative() ? *tol.relative() * a_norm : kKrylovGrowthTolerance * a_norm;

  Matrix frontier = basis;
  for (Index step = 1; step < n && basis.cols() < n; ++step) {
    Matrix w = a * frontier;
    for (int pass = 0; pass < 2; ++pass) w -= basis * (basis.transpose() * w);
    frontier = fresh_directions(w, threshold);
    if (frontier.cols() == 0) break;
    Matrix grown(n, basis.cols() + frontier.cols());
    grown << basis, frontier;
    basis = std::move(grown);
  }
  return SubspaceBasis::span_of(basis, tol);
}

SubspaceBasis controllable_subspace(const LtiSystem& sys, const RankTolerance& tol) {
  return krylov_subspace(sys.A(), sys.B(), tol);
}

SubspaceBasis orthogonal_complement(const SubspaceBasis& s) {
  const Index n = s.ambient_dim();
  if (s.dim() == 0) return SubspaceBasis::full(n);
  if (s.dim() == n) return SubspaceBasis::zero(n);
  return SubspaceBasis::span_of(orthonormal_kernel(s.basis().transpose()));
}

SubspaceBasis unobservable_subspace(const LtiSystem& sys, const RankTolerance& tol) {
  const SubspaceBasis observable =
      krylov_subspace(sys.A().transpose(), sys.C().transpose(), tol);
  return orthogonal_complement(observable);
}

MinPolyDegree min_poly_degree(const Matrix& a, const RankTolerance& tol) {
  const Index n = a.rows();
  if (n == 0 || a.cols() != n) throw InputError("min_poly_degree: A must be square and nonempty");
  require_finite(a, "min_poly_degree");

  const double scale = a.norm();
  if (scale == 0.0) return {1};  // A = 0 is annihilated by s.

  Matrix powers(n * n, n + 1);
  Matrix current = Matrix::Identity(n, n) / std::sqrt(static_cast<double>(n));
  powers.col(0) = current.reshaped();
  for (Index d = 1; d <= n; ++d) {
    current = (a * current) / scale;
    powers.col(d) = current.reshaped();
    if (numerical_rank(powers.leftCols(d + 1), tol) <= d) return {d};
  }
  // Unreachable in exact arithmetic (Cayley-Hamilton); round-off can leave
  // the last power looking independent.
  return {n};
}

Matrix state_input_data_matrix(const TrajectorySet& data, Index horizon) {
  if (!data.has_states()) throw InputError("theorem1_image_check: data carries no states");
  const Matrix hu = mosaic_hankel(data, horizon, Channel::inputs);
  Matrix hx(data.n(), hu.cols());
  Index col = 0;
  for (const Trajectory& t : data) {
    const Index cols = t.length() - horizon + 1;
    hx.middleCols(col, cols) = t.states().leftCols(cols);
    col += cols;
  }
  Matrix stacked(hx.rows() + hu.rows(), hu.cols());
  stacked << hx, hu;
  return stacked;
}

ImageCheckReport theorem1_image_check(const LtiSystem& sys, const TrajectorySet& data,
                                      Index horizon, const ImageCheckOptions& opts) {
  if (!data.has_states()) throw InputError("theorem1_image_check: data carries no states");
  if (data.n() != sys.n() || data.m() != sys.m()) {
    throw InputError("theorem1_image_check: data dimensions do not match the system");
  }
  if (horizon < 1) throw InputError("theorem1_image_check: L must be positive");

  ImageCheckReport report;
  report.delta = opts.delta ? *opts.delta : min_poly_degree(sys.A(), opts.rank_tol).delta_min;
  report.required_pe_order = report.delta + horizon;
  const PeCheck pe = check_collective_pe(data, report.required_pe_order, opts.rank_tol);
  if (!pe.exciting) {
    report.verdict = Verdict::hypothesis_violated;
    report.diagnostic = pe.diagnostic.empty()
                            ? "inputs are not collectively persistently exciting of order " +
                                  std::to_string(report.required_pe_order)
                            : pe.diagnostic;
    return report;
  }

  const SubspaceBasis image =
      SubspaceBasis::span_of(state_input_data_matrix(data, horizon), opts.rank_tol);
  const SubspaceBasis states =
      subspace_sum(controllable_subspace(sys, opts.rank_tol),
                   krylov_subspace(sys.A(), data.initial_states(), opts.rank_tol));
  const SubspaceBasis target =
      cartesian_product(states, SubspaceBasis::full(sys.m() * horizon));

  report.image_dim = image.dim();
  report.target_dim = target.dim();
  report.residual = subspace_distance(image, target);
  report.verdict = subspace_equal(image, target, opts.subspace_tol) ? Verdict::holds
                                                                    : Verdict::fails;
  return report;
}

SubspaceBasis parameterizable_initial_states(const LtiSystem& sys,
                                             const Matrix& initial_states,
                                             const RankTolerance& tol) {
  return subspace_sum(subspace_sum(controllable_subspace(sys, tol),
                                   unobservable_subspace(sys, tol)),
                      krylov_subspace(sys.A(), initial_states, tol));
}

bool theorem1_state_condition(const LtiSystem& sys, const TrajectorySet& data,
                              const Vector& xbar0, const RankTolerance& tol,
                              double subspace_tol) {
  if (xbar0.size() != sys.n()) {
    throw InputError("theorem1_state_condition: xbar0 has dimension " +
                     std::to_string(xbar0.size()) + ", system has n = " +
                     std::to_string(sys.n()));
  }
  return subspace_contains(parameterizable_initial_states(sys, data.initial_states(), tol),
                           xbar0, subspace_tol);
}

}  // namespace willems
