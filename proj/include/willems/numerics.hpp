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

#include <optional>

#include "willems/common.hpp"

namespace willems {

// Numerical-rank policy. Singular values strictly above the resolved
// absolute threshold count toward the rank. Without an explicit relative
// factor the threshold is max(rows, cols) * eps * sigma_max.
class RankTolerance {
 public:
  RankTolerance() = default;
  explicit RankTolerance(double relative);

  std::optional<double> relative() const { return relative_; }

  // Absolute threshold for a rows x cols matrix with largest singular
  // value sigma_max.
  double resolve(Index rows, Index cols, double sigma_max) const;

 private:
  std::optional<double> relative_;
};

// Throws InputError unless every entry of m is finite.
void require_finite(const Matrix& m, std::string_view what);

Vector singular_values(const Matrix& m);

Index numerical_rank(const Matrix& m, const RankTolerance& tol = {});

struct LeastSquaresResult {
  Matrix solution;
  double residual_norm = 0.0;  // Frobenius norm of a * solution - b
};

// Minimum-norm minimizer of ||a x - b||_F (pseudoinverse semantics).
LeastSquaresResult least_squares(const Matrix& a, const Matrix& b,
                                 const RankTolerance& tol = {});

// Orthonormal basis of the numerical column space of m. The column count
// equals numerical_rank(m, tol).
Matrix orthonormal_image(const Matrix& m, const RankTolerance& tol = {});

// Orthonormal basis of the numerical right kernel of m.
Matrix orthonormal_kernel(const Matrix& m, const RankTolerance& tol = {});

/// Subspace of R^n held as an orthonormal basis.
class SubspaceBasis {
 public:
  SubspaceBasis() = default;

  // Orthonormalizes the columns of `spanning`; its row count is the
  // ambient dimension.
  static SubspaceBasis span_of(const Matrix& spanning,
                               const RankTolerance& tol = {});
  static SubspaceBasis zero(Index ambient);
  static SubspaceBasis full(Index ambient);

  Index ambient_dim() const { return ambient_; }
  Index dim() const { return basis_.cols(); }
  const Matrix& basis() const { return basis_; }
  const RankTolerance& tolerance() const { return tol_; }

  // Orthogonal projection of the columns of v onto the subspace.
  Matrix project(const Matrix& v) const;

 private:
  SubspaceBasis(Index ambient, Matrix basis, RankTolerance tol)
      : ambient_(ambient), basis_(std::move(basis)), tol_(tol) {}

  Index ambient_ = 0;
  Matrix basis_;
  RankTolerance tol_;
};

inline constexpr double kSubspaceTolerance = 1e-8;

// Largest of the two Frobenius-norm residuals ||(I - P_a) Q_b|| and
// ||(I - P_b) Q_a||. Zero iff the two subspaces coincide (given equal
// dimension).
double subspace_distance(const SubspaceBasis& a, const SubspaceBasis& b);

bool subspace_equal(const SubspaceBasis& a, const SubspaceBasis& b,
                    double tol = kSubspaceTolerance);

// ||v - P v|| <= tol * ||v||; the zero vector lies in every subspace.
bool subspace_contains(const SubspaceBasis& space, const Vector& v,
                       double tol = kSubspaceTolerance);

SubspaceBasis subspace_sum(const SubspaceBasis& a, const SubspaceBasis& b);

// a x b as a subspace of R^(na + nb).
SubspaceBasis cartesian_product(const SubspaceBasis& a, const SubspaceBasis& b);

}  // namespace willems
