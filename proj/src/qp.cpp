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

#include "willems/qp.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "willems/numerics.hpp"

namespace willems {

std::string_view to_string(QpStatus s) {
  switch (s) {
    case QpStatus::optimal:
      return "optimal";
    case QpStatus::infeasible:
      return "infeasible";
    case QpStatus::unbounded:
      return "unbounded";
    case QpStatus::max_iter:
      return "max_iter";
    case QpStatus::numerical_failure:
      return "numerical_failure";
  }
  return "unknown";
}

double QuadraticProgram::objective(const Vector& x) const {
  return 0.5 * x.dot(P * x) + q.dot(x) + constant;
}

namespace {

// Equality rows whose singular values fall below this fraction of the
// largest are treated as dependent.
constexpr double kEqualityRankTolerance = 1e-12;

enum class Bound : signed char { none = 0, lower = -1, upper = 1 };

using WorkingSet = std::vector<Bound>;

std::vector<Index> free_indices(const WorkingSet& w) {
  std::vector<Index> f;
  for (size_t i = 0; i < w.size(); ++i) {
    if (w[i] == Bound::none) f.push_back(static_cast<Index>(i));
  }
  return f;
}

std::vector<Index> fixed_indices(const WorkingSet& w) {
  std::vector<Index> f;
  for (size_t i = 0; i < w.size(); ++i) {
    if (w[i] != Bound::none) f.push_back(static_cast<Index>(i));
  }
  return f;
}

// Orthonormal basis of {d : A_F d = 0} over the free coordinates.
Matrix free_null_space(const Matrix& a, const std::vector<Index>& free) {
  const Index nf = static_cast<Index>(free.size());
  if (a.rows() == 0 || nf == 0) return Matrix::Identity(nf, nf);
  return orthonormal_kernel(a(Eigen::all, free));
}

struct Multipliers {
  Vector lambda;  // equality rows
  Vector z;       // full length, zero off the working set
};

// Least-squares (lambda, z_W) with g + A' lambda - E_W' z_W = 0.
Multipliers estimate_multipliers(const Vector& g, const Matrix& a, const WorkingSet& w) {
  const Index n = g.size();
  const std::vector<Index> fixed = fixed_indices(w);
  const Index nw = static_cast<Index>(fixed.size());
  Matrix m = Matrix::Zero(n, a.rows() + nw);
  if (a.rows() > 0) m.leftCols(a.rows()) = a.transpose();
  for (Index k = 0; k < nw; ++k) m(fixed[static_cast<size_t>(k)], a.rows() + k) = -1.0;
  Multipliers out;
  out.z = Vector::Zero(n);
  if (m.cols() == 0) {
    out.lambda = Vector();
    return out;
  }
  const Vector y = least_squares(m, -g).solution.col(0);
  out.lambda = y.head(a.rows());
  for (Index k = 0; k < nw; ++k) out.z[fixed[static_cast<size_t>(k)]] = y[a.rows() + k];
  return out;
}

double stationarity_scale(const Matrix& p, const Vector& q, const Vector& x) {
  const double px = p.size() > 0 ? (p * x).lpNorm<Eigen::Infinity>() : 0.0;
  const double qn = q.size() > 0 ? q.lpNorm<Eigen::Infinity>() : 0.0;
  return std::max({1.0, qn, px});
}

struct CoreResult {
  Vector x;
  WorkingSet working;
  Multipliers multipliers;
  bool optimal = false;
  bool unbounded = false;
  int iterations = 0;
  // Orthonormal directions along which the objective is flat on the final
  // face (full-length vectors).
  Matrix flat_directions;
};

class ActiveSetCore {
 public:
  ActiveSetCore(const Matrix& p, const Vector& q, const Matrix& a, const Vector& lo,
                const Vector& hi, double dual_tol)
      : p_(p), q_(q), a_(a), lo_(lo), hi_(hi), dual_tol_(dual_tol) {}

  CoreResult run(Vector x, WorkingSet w, int max_iter) const {
    const Index n = x.size();
    CoreResult out;
    int stalled = 0;
    for (int iter = 0; iter < max_iter; ++iter) {
      out.iterations = iter + 1;
      const Vector g = p_ * x + q_;
      const double scale = stationarity_scale(p_, q_, x);
      const double grad_tol = 1e-11 * scale;
      const std::vector<Index> free = free_indices(w);
      const Matrix z_f = free_null_space(a_, free);

      Vector step = Vector::Zero(n);
      bool ray = false;
      Matrix flat;
      if (z_f.cols() > 0) {
        const Matrix pff = p_(free, free);
        const Matrix h = z_f.transpose() * pff * z_f;
        const Vector gz = z_f.transpose() * g(free);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
        const Vector& evals = eig.eigenvalues();
        const Matrix& evecs = eig.eigenvectors();
        const double lmax = evals.size() > 0 ? std::max(0.0, evals.maxCoeff()) : 0.0;
        const double curv_tol = 1e-12 * std::max({1.0, lmax});
        std::vector<Index> flat_cols, curved_cols;
        for (Index k = 0; k < evals.size(); ++k) {
          (evals[k] <= curv_tol ? flat_cols : curved_cols).push_back(k);
        }
        const Matrix v0 = evecs(Eigen::all, flat_cols);
        const Matrix vp = evecs(Eigen::all, curved_cols);
        flat = z_f * v0;
        const Vector g_flat = v0 * (v0.transpose() * gz);
        Vector d;
        if (g_flat.norm() > grad_tol) {
          ray = true;
          d = -g_flat;
        } else {
          const Vector coeffs = vp.transpose() * gz;
          Vector scaled(coeffs.size());
          for (Index k = 0; k < coeffs.size(); ++k) {
            scaled[k] = coeffs[k] / evals[curved_cols[static_cast<size_t>(k)]];
          }
          d = -(vp * scaled);
        }
        if (ray || gz.norm() > grad_tol) step(free) = z_f * d;
      }

      const double step_norm = step.lpNorm<Eigen::Infinity>();
      if (step_norm == 0.0) {
        Multipliers mult = estimate_multipliers(g, a_, w);
        // Largest sign violation among working bounds that can be released.
        Index drop = -1;
        double worst = dual_tol_ * scale;
        const bool bland = stalled > 3 * n;
        for (Index i = 0; i < n; ++i) {
          const Bound b = w[static_cast<size_t>(i)];
          if (b == Bound::none || lo_[i] == hi_[i]) continue;
          const double violation = b == Bound::lower ? -mult.z[i] : mult.z[i];
          if (violation > worst) {
            drop = i;
            if (bland) break;
            worst = violation;
          }
        }
        if (drop < 0) {
          out.x = std::move(x);
          out.working = std::move(w);
          out.multipliers = std::move(mult);
          out.optimal = true;
          out.flat_directions = std::move(flat);
          return out;
        }
        w[static_cast<size_t>(drop)] = Bound::none;
        continue;
      }

      // Ratio test; ties go to the lowest index.
      double alpha = ray ? kInf : 1.0;
      Index blocking = -1;
      Bound blocking_side = Bound::none;
      const double tiny = 1e-14 * step_norm;
      for (Index i = 0; i < n; ++i) {
        if (w[static_cast<size_t>(i)] != Bound::none) continue;
        double limit = kInf;
        Bound side = Bound::none;
        if (step[i] < -tiny && std::isfinite(lo_[i])) {
          limit = std::max(0.0, (lo_[i] - x[i]) / step[i]);
          side = Bound::lower;
        } else if (step[i] > tiny && std::isfinite(hi_[i])) {
          limit = std::max(0.0, (hi_[i] - x[i]) / step[i]);
          side = Bound::upper;
        }
        if (limit < alpha) {
          alpha = limit;
          blocking = i;
          blocking_side = side;
        }
      }
      if (!std::isfinite(alpha)) {
        out.x = std::move(x);
        out.working = std::move(w);
        out.unbounded = true;
        return out;
      }
      stalled = alpha == 0.0 ? stalled + 1 : 0;
      x += alpha * step;
      for (Index i = 0; i < n; ++i) x[i] = std::clamp(x[i], lo_[i], hi_[i]);
      if (blocking >= 0) {
        x[blocking] = blocking_side == Bound::lower ? lo_[blocking] : hi_[blocking];
        w[static_cast<size_t>(blocking)] = blocking_side;
      }
    }
    out.x = std::move(x);
    out.working = std::move(w);
    return out;
  }

 private:
  const Matrix& p_;
  const Vector& q_;
  const Matrix& a_;
  const Vector& lo_;
  const Vector& hi_;
  double dual_tol_;
};

// Bounds that x sits on, added only while they stay linearly independent
// of the equality rows and of each other.
WorkingSet initial_working_set(const Vector& x, const Matrix& a, const Vector& lo,
                               const Vector& hi) {
  const Index n = x.size();
  WorkingSet w(static_cast<size_t>(n), Bound::none);
  for (Index i = 0; i < n; ++i) {
    const bool at_lo = x[i] == lo[i];
    const bool at_hi = x[i] == hi[i];
    if (!at_lo && !at_hi) continue;
    const std::vector<Index> free = free_indices(w);
    const Matrix z = free_null_space(a, free);
    const auto pos = std::find(free.begin(), free.end(), i) - free.begin();
    if (z.cols() == 0 || z.row(pos).norm() <= 1e-10) continue;
    w[static_cast<size_t>(i)] = at_lo ? Bound::lower : Bound::upper;
  }
  return w;
}

double kkt_with_multipliers(const Matrix& p, const Vector& q, const Matrix& a,
                            const Vector& b, const Vector& lo, const Vector& hi,
                            const Vector& x, const Vector& lambda, const Vector& z) {
  const Index n = x.size();
  double box = 0.0, sign = 0.0, comp = 0.0;
  for (Index i = 0; i < n; ++i) {
    box = std::max({box, lo[i] - x[i], x[i] - hi[i]});
    if (z[i] > 0.0) {
      if (lo[i] != hi[i]) comp = std::max(comp, z[i] * std::abs(x[i] - lo[i]));
      if (!std::isfinite(lo[i])) sign = std::max(sign, z[i]);
    } else if (z[i] < 0.0) {
      if (lo[i] != hi[i]) comp = std::max(comp, -z[i] * std::abs(x[i] - hi[i]));
      if (!std::isfinite(hi[i])) sign = std::max(sign, -z[i]);
    }
  }
  const double scale = stationarity_scale(p, q, x);
  Vector stat = p * x + q - z;
  if (a.rows() > 0) stat += a.transpose() * lambda;
  double eq = 0.0;
  if (a.rows() > 0) {
    const double bscale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
    eq = (a * x - b).lpNorm<Eigen::Infinity>() / bscale;
  }
  const double st = n > 0 ? stat.lpNorm<Eigen::Infinity>() / scale : 0.0;
  return std::max({eq, box, st, sign / scale, comp / scale});
}

struct Prepared {
  Matrix P;
  Vector lo, hi;
};

Prepared prepare(const QuadraticProgram& prob) {
  const Index n = prob.q.size();
  if (prob.P.rows() != n || prob.P.cols() != n) {
    throw InputError("solve_qp: P must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (prob.A_eq.rows() != prob.b_eq.size() || (prob.A_eq.rows() > 0 && prob.A_eq.cols() != n)) {
    throw InputError("solve_qp: A_eq/b_eq dimensions are inconsistent with " +
                     std::to_string(n) + " variables");
  }
  if ((prob.lower.size() != 0 && prob.lower.size() != n) ||
      (prob.upper.size() != 0 && prob.upper.size() != n)) {
    throw InputError("solve_qp: bound vectors must be empty or have length " + std::to_string(n));
  }
  require_finite(prob.P, "solve_qp(P)");
  require_finite(prob.q, "solve_qp(q)");
  require_finite(prob.A_eq, "solve_qp(A_eq)");
  require_finite(prob.b_eq, "solve_qp(b_eq)");
  const double sym = (prob.P - prob.P.transpose()).lpNorm<Eigen::Infinity>();
  if (sym > 1e-10 * std::max(1.0, prob.P.lpNorm<Eigen::Infinity>())) {
    throw InputError("solve_qp: P is not symmetric");
  }

  Prepared out;
  out.P = 0.5 * (prob.P + prob.P.transpose());
  for (const auto& [first, count] : prob.ridge_blocks) {
    if (first < 0 || count < 0 || first + count > n) {
      throw InputError("solve_qp: ridge block out of range");
    }
    out.P.diagonal().segment(first, count).array() += prob.ridge;
  }
  out.lo = prob.lower.size() ? prob.lower : Vector::Constant(n, -kInf);
  out.hi = prob.upper.size() ? prob.upper : Vector::Constant(n, kInf);
  if (out.lo.hasNaN() || out.hi.hasNaN()) throw InputError("solve_qp: NaN bound");
  return out;
}

}  // namespace

double kkt_residual(const QuadraticProgram& prob, const Vector& x, double active_tol) {
  const Prepared prep = prepare(prob);
  const Index n = x.size();
  WorkingSet w(static_cast<size_t>(n), Bound::none);
  for (Index i = 0; i < n; ++i) {
    const double tol = active_tol * std::max(1.0, std::abs(x[i]));
    if (std::abs(x[i] - prep.lo[i]) <= tol) {
      w[static_cast<size_t>(i)] = Bound::lower;
    } else if (std::abs(x[i] - prep.hi[i]) <= tol) {
      w[static_cast<size_t>(i)] = Bound::upper;
    }
  }
  const Vector g = prep.P * x + prob.q;
  const Multipliers mult = estimate_multipliers(g, prob.A_eq, w);
  return kkt_with_multipliers(prep.P, prob.q, prob.A_eq, prob.b_eq, prep.lo, prep.hi, x,
                              mult.lambda, mult.z);
}

QpSolution solve_qp(const QuadraticProgram& prob, const QpSettings& settings) {
  const Prepared prep = prepare(prob);
  const Index n = prob.q.size();
  const Vector& lo = prep.lo;
  const Vector& hi = prep.hi;

  QpSolution sol;
  sol.x = Vector::Zero(n);
  sol.eq_multipliers = Vector::Zero(prob.b_eq.size());
  sol.bound_multipliers = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    if (lo[i] > hi[i]) {
      sol.status = QpStatus::infeasible;
      return sol;
    }
  }

  // Replace the equality rows by an orthogonal, full-row-rank equivalent
  // a = U_r' A_eq, b = U_r' b_eq; inconsistent right-hand sides are
  // infeasible.
  Matrix a(0, n);
  Vector b(0);
  Matrix u_r;
  if (prob.A_eq.rows() > 0) {
    Eigen::BDCSVD<Matrix> svd(prob.A_eq, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    Index r = 0;
    while (r < sv.size() && sv[r] > kEqualityRankTolerance * sv[0]) ++r;
    u_r = svd.matrixU().leftCols(r);
    a = sv.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();
    b = u_r.transpose() * prob.b_eq;
    const double inconsistency = (prob.b_eq - u_r * b).norm();
    if (inconsistency > settings.tol * std::max(1.0, prob.b_eq.norm())) {
      sol.status = QpStatus::infeasible;
      return sol;
    }
  }

  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = std::clamp(0.0, lo[i], hi[i]);
  int iterations = 0;

  if (a.rows() > 0) {
    // Phase 1: a box-feasible point minimizing ||a x - b||^2.
    const Matrix p1 = a.transpose() * a;
    const Vector q1 = -(a.transpose() * b);
    const Matrix none(0, n);
    const ActiveSetCore phase1(p1, q1, none, lo, hi, settings.tol);
    CoreResult r1 = phase1.run(x, initial_working_set(x, none, lo, hi), settings.max_iter);
    iterations += r1.iterations;
    if (!r1.optimal) {
      sol.status = QpStatus::max_iter;
      sol.iterations = iterations;
      return sol;
    }
    x = std::move(r1.x);
    // Remove the remaining equality residual on the free coordinates.
    const std::vector<Index> free = free_indices(r1.working);
    if (!free.empty()) {
      const Vector fix = least_squares(a(Eigen::all, free), b - a * x).solution.col(0);
      Vector candidate = x;
      candidate(free) += fix;
      bool inside = true;
      for (Index i = 0; i < n; ++i) inside = inside && candidate[i] >= lo[i] && candidate[i] <= hi[i];
      if (inside) x = std::move(candidate);
    }
    const double infeas = (a * x - b).norm();
    if (infeas > settings.tol * std::max(1.0, b.norm())) {
      sol.x = x;
      sol.status = QpStatus::infeasible;
      sol.iterations = iterations;
      return sol;
    }
  }

  const ActiveSetCore phase2(prep.P, prob.q, a, lo, hi, settings.tol);
  CoreResult r2 = phase2.run(x, initial_working_set(x, a, lo, hi), settings.max_iter);
  iterations += r2.iterations;
  sol.iterations = iterations;
  sol.x = r2.x;
  if (r2.unbounded) {
    sol.status = QpStatus::unbounded;
    sol.objective = -kInf;
    return sol;
  }
  if (!r2.optimal) {
    sol.status = QpStatus::max_iter;
    sol.objective = prob.objective(sol.x);
    return sol;
  }

  // Least-norm point along the flat directions of the final face, clipped
  // to stay inside the box.
  if (r2.flat_directions.cols() > 0) {
    const std::vector<Index> free = free_indices(r2.working);
    const Matrix& dirs = r2.flat_directions;
    Vector shift = Vector::Zero(n);
    shift(free) = -(dirs * (dirs.transpose() * sol.x(free)));
    double alpha = 1.0;
    for (Index i = 0; i < n; ++i) {
      if (shift[i] < 0.0 && std::isfinite(lo[i])) alpha = std::min(alpha, (lo[i] - sol.x[i]) / shift[i]);
      if (shift[i] > 0.0 && std::isfinite(hi[i])) alpha = std::min(alpha, (hi[i] - sol.x[i]) / shift[i]);
    }
    sol.x += std::max(0.0, alpha) * shift;
    for (Index i = 0; i < n; ++i) sol.x[i] = std::clamp(sol.x[i], lo[i], hi[i]);
  }

  // Multipliers in terms of the caller's equality rows: a' mu = A_eq' U_r mu.
  const Vector g = prep.P * sol.x + prob.q;
  Multipliers mult = estimate_multipliers(g, a, r2.working);
  sol.eq_multipliers = u_r.cols() > 0 ? Vector(u_r * mult.lambda) : Vector::Zero(prob.b_eq.size());
  sol.bound_multipliers = mult.z;
  sol.objective = 0.5 * sol.x.dot(prep.P * sol.x) + prob.q.dot(sol.x) + prob.constant;
  sol.kkt_residual = kkt_with_multipliers(prep.P, prob.q, prob.A_eq, prob.b_eq, lo, hi, sol.x,
                                          sol.eq_multipliers, sol.bound_multipliers);
  sol.status = sol.kkt_residual <= settings.tol ? QpStatus::optimal : QpStatus::numerical_failure;
  return sol;
}

}  // namespace willems
