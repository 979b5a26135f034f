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

#include "willems/predictive.hpp"

#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "willems/hankel.hpp"
#include "willems/parameterize.hpp"
#include "willems/trajectory_io.hpp"

namespace willems {

std::string_view to_string(StepStatus s) {
  switch (s) {
    case StepStatus::optimal:
      return "optimal";
    case StepStatus::infeasible:
      return "infeasible";
    case StepStatus::hypothesis_violated:
      return "hypothesis_violated";
    case StepStatus::solver_failure:
      return "solver_failure";
  }
  return "unknown";
}

std::string_view to_string(Controller c) { return c == Controller::mpc ? "mpc" : "deepc"; }

namespace {

void require_psd(const Matrix& w, Index dim, const char* name) {
  if (w.rows() != dim || w.cols() != dim) {
    throw InputError(std::string(name) + " must be " + std::to_string(dim) + "x" +
                     std::to_string(dim));
  }
  require_finite(w, name);
  if ((w - w.transpose()).lpNorm<Eigen::Infinity>() > 1e-10 * std::max(1.0, w.lpNorm<Eigen::Infinity>())) {
    throw InputError(std::string(name) + " must be symmetric");
  }
  if (dim > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(w, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, w.norm())) {
      throw InputError(std::string(name) + " must be positive semidefinite");
    }
  }
}

void require_box(const Vector& lo, const Vector& hi, Index dim, const char* lo_name,
                 const char* hi_name) {
  if (lo.size() != 0 && lo.size() != dim) {
    throw InputError(std::string(lo_name) + " must be empty or have length " + std::to_string(dim));
  }
  if (hi.size() != 0 && hi.size() != dim) {
    throw InputError(std::string(hi_name) + " must be empty or have length " + std::to_string(dim));
  }
  if (lo.size() && hi.size()) {
    for (Index i = 0; i < dim; ++i) {
      if (lo[i] > hi[i]) throw InputError(std::string(lo_name) + " exceeds " + hi_name);
    }
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

// Tracking cost over the planned inputs/outputs starting at the given
// variable offsets, plus the box constraints on them.
void add_tracking_terms(QuadraticProgram& prob, Index u_off, Index y_off,
                        const PredictiveConfig& cfg, Index m, Index p, Index t) {
  const Index L = cfg.horizon;
  for (Index j = 0; j < L; ++j) {
    const Index ui = u_off + j * m;
    const Index yi = y_off + j * p;
    prob.P.block(ui, ui, m, m) += 2.0 * cfg.R;
    prob.P.block(yi, yi, p, p) += 2.0 * cfg.Q;
    const Vector r = cfg.reference_at(t + j);
    prob.q.segment(yi, p) -= 2.0 * cfg.Q * r;
    prob.constant += r.dot(cfg.Q * r);
    if (cfg.u_min.size()) prob.lower.segment(ui, m) = cfg.u_min;
    if (cfg.u_max.size()) prob.upper.segment(ui, m) = cfg.u_max;
    if (cfg.y_min.size()) prob.lower.segment(yi, p) = cfg.y_min;
    if (cfg.y_max.size()) prob.upper.segment(yi, p) = cfg.y_max;
  }
}

QuadraticProgram empty_program(Index nv, Index neq) {
  QuadraticProgram prob;
  prob.P = Matrix::Zero(nv, nv);
  prob.q = Vector::Zero(nv);
  prob.A_eq = Matrix::Zero(neq, nv);
  prob.b_eq = Vector::Zero(neq);
  prob.lower = Vector::Constant(nv, -kInf);
  prob.upper = Vector::Constant(nv, kInf);
  return prob;
}

StepResult finish_step(const QuadraticProgram& prob, const PredictiveConfig& cfg, Index u_off,
                       Index y_off, Index m, Index p, Vector* full = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  const QpSolution sol = solve_qp(prob, cfg.qp);
  StepResult out;
  out.solve_ms = elapsed_ms(start);
  switch (sol.status) {
    case QpStatus::optimal:
      out.status = StepStatus::optimal;
      break;
    case QpStatus::infeasible:
      out.status = StepStatus::infeasible;
      out.diagnostic = "predictive QP is infeasible";
      return out;
    default:
      out.status = StepStatus::solver_failure;
      out.diagnostic = "QP solver returned " + std::string(to_string(sol.status));
      return out;
  }
  const Index L = cfg.horizon;
  out.planned_inputs = sol.x.segment(u_off, L * m).reshaped(m, L);
  out.planned_outputs = sol.x.segment(y_off, L * p).reshaped(p, L);
  out.input = out.planned_inputs.col(0);
  out.objective = sol.objective;
  if (full) *full = sol.x;
  return out;
}

void require_history(const Trajectory& history, const PredictiveConfig& cfg, Index t,
                     Index m, Index p) {
  if (t < cfg.past) throw InputError("predictive step: requires t >= N");
  if (cfg.past > 0 && history.length() < t) {
    throw InputError("predictive step: history shorter than t");
  }
  if (history.m() != m || (cfg.past > 0 && history.p() != p)) {
    throw InputError("predictive step: history channel dimensions do not match");
  }
}

}  // namespace

void PredictiveConfig::validate(Index m, Index p) const {
  if (horizon < 1) throw InputError("config field 'L' must be >= 1");
  if (past < 0) throw InputError("config field 'N' must be >= 0");
  if (!(past <= data_length && data_length <= run_length)) {
    throw InputError("config fields must satisfy N <= T <= K");
  }
  require_psd(Q, p, "config field 'Q'");
  require_psd(R, m, "config field 'R'");
  if (reference.rows() != p || reference.cols() < 1) {
    throw InputError("config field 'reference' must have " + std::to_string(p) + " rows");
  }
  require_finite(reference, "config field 'reference'");
  require_box(u_min, u_max, m, "config field 'u_min'", "config field 'u_max'");
  require_box(y_min, y_max, p, "config field 'y_min'", "config field 'y_max'");
  if (!(excitation_low < excitation_high)) {
    throw InputError("config field 'excitation' must satisfy low < high");
  }
  if (delta < 0) throw InputError("config field 'delta' must be >= 0");
  if (g_ridge < 0) throw InputError("config field 'g_ridge' must be >= 0");
}

Vector PredictiveConfig::reference_at(Index t) const {
  if (reference.cols() == 1) return reference.col(0);
  return reference.col(std::min(t, reference.cols() - 1));
}

StepResult mpc_step(const LtiSystem& sys, const Trajectory& history,
                    const PredictiveConfig& cfg, Index t) {
  const Index n = sys.n(), m = sys.m(), p = sys.p();
  const Index N = cfg.past, L = cfg.horizon;
  cfg.validate(m, p);
  require_history(history, cfg, t, m, p);

  // Variables: xbar_{t-N} .. xbar_{t+L-1}, ubar_t .. ubar_{t+L-1},
  // ybar_t .. ybar_{t+L-1}.
  const Index x_off = 0;
  const Index u_off = (N + L) * n;
  const Index y_off = u_off + L * m;
  const Index nv = y_off + L * p;
  const Index neq = N * (n + p) + (L - 1) * n + L * p;
  QuadraticProgram prob = empty_program(nv, neq);

  Index row = 0;
  auto xcol = [&](Index k) { return x_off + k * n; };
  for (Index k = 0; k < N; ++k) {
    const Vector u = history.inputs().col(t - N + k);
    const Vector y = history.outputs().col(t - N + k);
    prob.A_eq.block(row, xcol(k + 1), n, n) = Matrix::Identity(n, n);
    prob.A_eq.block(row, xcol(k), n, n) = -sys.A();
    prob.b_eq.segment(row, n) = sys.B() * u;
    row += n;
    prob.A_eq.block(row, xcol(k), p, n) = sys.C();
    prob.b_eq.segment(row, p) = y - sys.D() * u;
    row += p;
  }
  for (Index j = 0; j < L; ++j) {
    const Index k = N + j;
    if (j + 1 < L) {
      prob.A_eq.block(row, xcol(k + 1), n, n) = Matrix::Identity(n, n);
      prob.A_eq.block(row, xcol(k), n, n) = -sys.A();
      prob.A_eq.block(row, u_off + j * m, n, m) = -sys.B();
      row += n;
    }
    prob.A_eq.block(row, y_off + j * p, p, p) = Matrix::Identity(p, p);
    prob.A_eq.block(row, xcol(k), p, n) = -sys.C();
    prob.A_eq.block(row, u_off + j * m, p, m) = -sys.D();
    row += p;
  }
  add_tracking_terms(prob, u_off, y_off, cfg, m, p, t);
  return finish_step(prob, cfg, u_off, y_off, m, p);
}

StepResult deepc_step(const Trajectory& data, const Trajectory& history,
                      const PredictiveConfig& cfg, Index t) {
  if (!data.has_outputs()) throw InputError("deepc_step: data carries no outputs");
  const Index m = data.m(), p = data.p();
  const Index N = cfg.past, L = cfg.horizon;
  cfg.validate(m, p);
  require_history(history, cfg, t, m, p);
  if (cfg.delta < 1) throw InputError("deepc_step: config field 'delta' must be set");
  const Index depth = N + L;
  if (data.length() < depth) {
    throw InputError("deepc_step: data length " + std::to_string(data.length()) +
                     " is shorter than N + L = " + std::to_string(depth));
  }

  const TrajectorySet set({data.without_states()});
  const Index order = cfg.delta + depth;
  const PeCheck pe = check_collective_pe(set, order);
  if (!pe.exciting) {
    StepResult out;
    out.status = StepStatus::hypothesis_violated;
    out.diagnostic = "data input is not persistently exciting of order " + std::to_string(order) +
                     (pe.diagnostic.empty() ? "" : ": " + pe.diagnostic);
    return out;
  }

  const Matrix hu = mosaic_hankel(set, depth, Channel::inputs);
  const Matrix hy = mosaic_hankel(set, depth, Channel::outputs);
  const Index cols = hu.cols();

  // Variables: g, ubar_t .. ubar_{t+L-1}, ybar_t .. ybar_{t+L-1}.
  const Index u_off = cols;
  const Index y_off = u_off + L * m;
  const Index nv = y_off + L * p;
  const Index neq = depth * (m + p);
  QuadraticProgram prob = empty_program(nv, neq);

  prob.A_eq.block(0, 0, depth * m, cols) = hu;
  prob.A_eq.block(depth * m, 0, depth * p, cols) = hy;
  if (N > 0) {
    prob.b_eq.segment(0, N * m) = stack_samples(history.inputs().middleCols(t - N, N));
    prob.b_eq.segment(depth * m, N * p) = stack_samples(history.outputs().middleCols(t - N, N));
  }
  prob.A_eq.block(N * m, u_off, L * m, L * m) = -Matrix::Identity(L * m, L * m);
  prob.A_eq.block(depth * m + N * p, y_off, L * p, L * p) = -Matrix::Identity(L * p, L * p);
  add_tracking_terms(prob, u_off, y_off, cfg, m, p, t);
  if (cfg.g_ridge > 0.0) {
    prob.ridge = cfg.g_ridge;
    prob.ridge_blocks.emplace_back(0, cols);
  }

  Vector full;
  StepResult out = finish_step(prob, cfg, u_off, y_off, m, p, &full);
  if (out.status == StepStatus::optimal) out.g = full.head(cols);
  return out;
}

Matrix ClosedLoopLog::inputs() const {
  if (entries.empty()) return Matrix();
  Matrix u(entries.front().u.size(), static_cast<Index>(entries.size()));
  for (size_t i = 0; i < entries.size(); ++i) u.col(static_cast<Index>(i)) = entries[i].u;
  return u;
}

Matrix ClosedLoopLog::outputs() const {
  if (entries.empty()) return Matrix();
  Matrix y(entries.front().y.size(), static_cast<Index>(entries.size()));
  for (size_t i = 0; i < entries.size(); ++i) y.col(static_cast<Index>(i)) = entries[i].y;
  return y;
}

ClosedLoopLog run_closed_loop(const LtiSystem& sys, const PredictiveConfig& cfg_in,
                              Controller controller, std::uint64_t seed) {
  const Index n = sys.n(), m = sys.m(), p = sys.p();
  PredictiveConfig cfg = cfg_in;
  if (cfg.delta == 0) cfg.delta = n;
  cfg.validate(m, p);
  const Index T = cfg.data_length, K = cfg.run_length;
  const Index N = cfg.past, L = cfg.horizon;

  ClosedLoopLog log;
  log.controller = controller;
  log.reference.resize(p, K + 1);
  for (Index t = 0; t <= K; ++t) log.reference.col(t) = cfg.reference_at(t);

  Vector x = cfg.x0.size() ? cfg.x0 : Vector::Zero(n);
  if (x.size() != n) throw InputError("config field 'x0' must have length " + std::to_string(n));

  constexpr Index kMaxDraws = 100;
  const Index order = cfg.delta + N + L;
  Matrix excitation;
  bool exciting = false;
  for (Index attempt = 0; attempt < kMaxDraws && !exciting; ++attempt) {
    excitation = random_input(m, T, cfg.excitation_low, cfg.excitation_high,
                              seed + static_cast<std::uint64_t>(attempt));
    log.excitation_attempts = attempt + 1;
    exciting = is_collectively_pe(TrajectorySet({Trajectory(excitation, std::nullopt, std::nullopt)}), order);
  }
  if (!exciting) {
    log.aborted = true;
    log.abort_status = StepStatus::hypothesis_violated;
    log.abort_reason = "no excitation draw was persistently exciting of order " +
                       std::to_string(order) + " within " + std::to_string(kMaxDraws) + " draws";
    return log;
  }

  Matrix u_hist(m, K + 1), y_hist(p, K + 1);
  auto apply = [&](Index t, const Vector& u) {
    const Vector y = sys.C() * x + sys.D() * u;
    u_hist.col(t) = u;
    y_hist.col(t) = y;
    x = sys.A() * x + sys.B() * u;
    return y;
  };

  for (Index t = 0; t < T; ++t) {
    LogEntry e;
    e.t = t;
    e.u = excitation.col(t);
    e.y = apply(t, e.u);
    e.objective = std::numeric_limits<double>::quiet_NaN();
    e.status = "excitation";
    log.entries.push_back(std::move(e));
  }

  const Trajectory prefix(u_hist.leftCols(T), std::nullopt, Matrix(y_hist.leftCols(T)));
  for (Index t = T; t <= K; ++t) {
    const Trajectory history(u_hist.leftCols(t), std::nullopt, Matrix(y_hist.leftCols(t)));
    const StepResult step = controller == Controller::mpc ? mpc_step(sys, history, cfg, t)
                                                          : deepc_step(prefix, history, cfg, t);
    if (step.status != StepStatus::optimal) {
      log.aborted = true;
      log.abort_status = step.status;
      log.abort_reason = "step t = " + std::to_string(t) + ": " + step.diagnostic;
      return log;
    }
    LogEntry e;
    e.t = t;
    e.control = true;
    e.u = step.input;
    e.y = apply(t, e.u);
    e.objective = step.objective;
    e.status = std::string(to_string(step.status));
    e.solve_ms = step.solve_ms;
    log.entries.push_back(std::move(e));
  }
  return log;
}

std::string closed_loop_to_csv(const ClosedLoopLog& log, bool record_timing) {
  std::ostringstream os;
  const Index m = log.entries.empty() ? 0 : log.entries.front().u.size();
  const Index p = log.entries.empty() ? log.reference.rows() : log.entries.front().y.size();
  os << "t,phase";
  for (Index i = 0; i < m; ++i) os << ",u_" << i;
  for (Index i = 0; i < p; ++i) os << ",y_" << i;
  os << ",objective,status,solve_ms\n";
  for (const LogEntry& e : log.entries) {
    os << e.t << ',' << (e.control ? "control" : "excitation");
    for (Index i = 0; i < m; ++i) os << ',' << format_real(e.u[i]);
    for (Index i = 0; i < p; ++i) os << ',' << format_real(e.y[i]);
    os << ',' << format_real(e.objective) << ',' << e.status << ','
       << format_real(record_timing ? e.solve_ms : 0.0) << '\n';
  }
  return os.str();
}

namespace {

double parse_field(const std::string& s) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InputError("closed-loop CSV: cannot parse '" + s + "'");
  }
  if (used != s.size()) throw InputError("closed-loop CSV: cannot parse '" + s + "'");
  return v;
}

}  // namespace

ClosedLoopLog read_closed_loop_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("closed-loop CSV: missing header");
  const auto header = split_csv_line(line);
  Index m = 0, p = 0;
  for (const auto& h : header) {
    if (h.rfind("u_", 0) == 0) ++m;
    if (h.rfind("y_", 0) == 0) ++p;
  }
  const size_t expected = static_cast<size_t>(2 + m + p + 3);
  if (header.size() != expected || header[0] != "t" || header[1] != "phase") {
    throw InputError("closed-loop CSV: unexpected header");
  }
  ClosedLoopLog log;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != expected) throw InputError("closed-loop CSV: wrong field count");
    LogEntry e;
    e.t = static_cast<Index>(parse_field(f[0]));
    e.control = f[1] == "control";
    e.u.resize(m);
    e.y.resize(p);
    for (Index i = 0; i < m; ++i) e.u[i] = parse_field(f[static_cast<size_t>(2 + i)]);
    for (Index i = 0; i < p; ++i) e.y[i] = parse_field(f[static_cast<size_t>(2 + m + i)]);
    e.objective = parse_field(f[static_cast<size_t>(2 + m + p)]);
    e.status = f[static_cast<size_t>(3 + m + p)];
    e.solve_ms = parse_field(f[static_cast<size_t>(4 + m + p)]);
    log.entries.push_back(std::move(e));
  }
  return log;
}

std::string reference_to_csv(const ClosedLoopLog& log) {
  std::ostringstream os;
  os << "t";
  for (Index i = 0; i < log.reference.rows(); ++i) os << ",r_" << i;
  os << '\n';
  for (Index t = 0; t < log.reference.cols(); ++t) {
    os << t;
    for (Index i = 0; i < log.reference.rows(); ++i) os << ',' << format_real(log.reference(i, t));
    os << '\n';
  }
  return os.str();
}

}  // namespace willems
