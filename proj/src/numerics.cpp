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

#include "willems/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

namespace willems {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::holds:
      return "holds";
    case Verdict::fails:
      return "fails";
    case Verdict::hypothesis_violated:
      return "hypothesis violated";
  }
  return "unknown";
}

RankTolerance::RankTolerance(double relative) : relative_(relative) {
  if (!(relative >= 0.0) || !std::isfinite(relative)) {
    throw InputError("rank tolerance must be a finite nonnegative number");
  }
}

double RankTolerance::resolve(Index rows, Index cols, double sigma_max) const {
  if (relative_) return *relative_ * sigma_max;
  return static_cast<double>(std::max(rows, cols)) *
         std::numeric_limits<double>::epsilon() * sigma_max;
}

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw InputError(std::string(what) + ": non-finite entry");
  }
}

Vector singular_values(const Matrix& m) {
  require_finite(m, "singular_values");
  if (m.size() == 0) return Vector();
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

namespace {

Index count_above(const Vector& sv, double threshold) {
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > threshold) ++r;
  }
  return r;
}

}  // namespace

Index numerical_rank(const Matrix& m, const RankTolerance& tol) {
  if (m.size() == 0) throw InputError("numerical_rank: empty matrix");
  const Vector sv = singular_values(m);
  const double sigma_max = sv.size() > 0 ? sv[0] : 0.0;
  if (sigma_max == 0.0) return 0;
  return count_above(sv, tol.resolve(m.rows(), m.cols(), sigma_max));
}

LeastSquaresResult least_squares(const Matrix& a, const Matrix& b,
                                 const RankTolerance& tol) {
  if (a.rows() != b.rows()) {
    throw InputError("least_squares: a has " + std::to_string(a.rows()) +
                     " rows but b has " + std::to_string(b.rows()));
  }
  require_finite(a, "least_squares(a)");
  require_finite(b, "least_squares(b)");

  LeastSquaresResult out;
  out.solution = Matrix::Zero(a.cols(), b.cols());
  if (a.size() == 0) {
    out.residual_norm = b.norm();
    return out;
  }
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? sv[0] : 0.0;
  if (sigma_max > 0.0) {
    const Index r = count_above(sv, tol.resolve(a.rows(), a.cols(), sigma_max));
    const auto u = svd.matrixU().leftCols(r);
    const auto v = svd.matrixV().leftCols(r);
    const Matrix coeffs = sv.head(r).cwiseInverse().asDiagonal() * (u.transpose() * b);
    out.solution = v * coeffs;
  }
  out.residual_norm = (a * out.solution - b).norm();
  return out;
}

Matrix orthonormal_image(const Matrix& m, const RankTolerance& tol) {
  require_finite(m, "orthonormal_image");
  if (m.size() == 0) return Matrix(m.rows(), 0);
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  if (sv[0] == 0.0) return Matrix(m.rows(), 0);
  const Index r = count_above(sv, tol.resolve(m.rows(), m.cols(), sv[0]));
  return svd.matrixU().leftCols(r);
}

Matrix orthonormal_kernel(const Matrix& m, const RankTolerance& tol) {
  require_finite(m, "orthonormal_kernel");
  const Index n = m.cols();
  if (m.rows() == 0 || n == 0) return Matrix::Identity(n, n);
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  if (sv[0] == 0.0) return Matrix::Identity(n, n);
  const Index r = count_above(sv, tol.resolve(m.rows(), m.cols(), sv[0]));
  return svd.matrixV().rightCols(n - r);
}

SubspaceBasis SubspaceBasis::span_of(const Matrix& spanning,
                                     const RankTolerance& tol) {
  return SubspaceBasis(spanning.rows(), orthonormal_image(spanning, tol), tol);
}

SubspaceBasis SubspaceBasis::zero(Index ambient) {
  return SubspaceBasis(ambient, Matrix(ambient, 0), RankTolerance{});
}

SubspaceBasis SubspaceBasis::full(Index ambient) {
  return SubspaceBasis(ambient, Matrix::Identity(ambient, ambient),
                       RankTolerance{});
}

Matrix SubspaceBasis::project(const Matrix& v) const {
  if (v.rows() != ambient_) {
    throw InputError("project: vector dimension " + std::to_string(v.rows()) +
                     " does not match ambient dimension " +
                     std::to_string(ambient_));
  }
  return basis_ * (basis_.transpose() * v);
}

namespace {

void require_same_ambient(const SubspaceBasis& a, const SubspaceBasis& b) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw InputError("subspace ambient dimensions differ: " +
                     std::to_string(a.ambient_dim()) + " vs " +
                     std::to_string(b.ambient_dim()));
  }
}

}  // namespace

double subspace_distance(const SubspaceBasis& a, const SubspaceBasis& b) {
  require_same_ambient(a, b);
  const double ab = (b.basis() - a.project(b.basis())).norm();
  const double ba = (a.basis() - b.project(a.basis())).norm();
  return std::max(ab, ba);
}

bool subspace_equal(const SubspaceBasis& a, const SubspaceBasis& b, double tol) {
  require_same_ambient(a, b);
  if (a.dim() != b.dim()) return false;
  return subspace_distance(a, b) <= tol;
}

bool subspace_contains(const SubspaceBasis& space, const Vector& v, double tol) {
  require_finite(v, "subspace_contains");
  const double norm = v.norm();
  if (norm == 0.0) return true;
  return (v - space.project(v)).norm() <= tol * norm;
}

SubspaceBasis subspace_sum(const SubspaceBasis& a, const SubspaceBasis& b) {
  require_same_ambient(a, b);
  Matrix joined(a.ambient_dim(), a.dim() + b.dim());
  joined << a.basis(), b.basis();
  return SubspaceBasis::span_of(joined, a.tolerance());
}

SubspaceBasis cartesian_product(const SubspaceBasis& a, const SubspaceBasis& b) {
  Matrix blocks = Matrix::Zero(a.ambient_dim() + b.ambient_dim(), a.dim() + b.dim());
  blocks.topLeftCorner(a.ambient_dim(), a.dim()) = a.basis();
  blocks.bottomRightCorner(b.ambient_dim(), b.dim()) = b.basis();
  return SubspaceBasis::span_of(blocks, a.tolerance());
}

}  // namespace willems
