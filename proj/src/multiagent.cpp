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

#include "willems/multiagent.hpp"

#include <chrono>
#include <cmath>
#include <istream>
#include <sstream>

#include <Eigen/SVD>

#include "willems/hankel.hpp"
#include "willems/subspace.hpp"
#include "willems/trajectory_io.hpp"

namespace willems {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

void MultiAgentSpec::validate() const {
  if (Abar.rows() < 1 || Abar.rows() != Abar.cols()) {
    throw InputError("multi-agent spec: Abar must be square and non-empty");
  }
  if (Bbar.rows() != Abar.rows() || Bbar.cols() < 1) {
    throw InputError("multi-agent spec: Bbar must have " + std::to_string(Abar.rows()) +
                     " rows and at least one column");
  }
  require_finite(Abar, "multi-agent spec Abar");
  require_finite(Bbar, "multi-agent spec Bbar");
  if (agents < 1) throw InputError("multi-agent spec: agent count must be >= 1");
  for (size_t e = 0; e < edges.size(); ++e) {
    const auto [head, tail] = edges[e];
    if (head < 0 || head >= agents || tail < 0 || tail >= agents) {
      throw InputError("multi-agent spec: edge " + std::to_string(e) +
                       " references a node outside [0, " + std::to_string(agents) + ")");
    }
    if (head == tail) {
      throw InputError("multi-agent spec: edge " + std::to_string(e) + " is a self-loop");
    }
  }
  if (krylov_subspace(Abar, Bbar).dim() != Abar.rows()) {
    throw InputError("multi-agent spec: (Abar, Bbar) is not controllable");
  }
}

std::vector<std::pair<Index, Index>> star_edges(Index agents) {
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 1; i < agents; ++i) edges.emplace_back(0, i);
  return edges;
}

Matrix incidence_matrix(const MultiAgentSpec& spec) {
  Matrix e = Matrix::Zero(static_cast<Index>(spec.edges.size()), spec.agents);
  for (size_t r = 0; r < spec.edges.size(); ++r) {
    e(static_cast<Index>(r), spec.edges[r].first) = 1.0;
    e(static_cast<Index>(r), spec.edges[r].second) = -1.0;
  }
  return e;
}

LtiSystem build_system(const MultiAgentSpec& spec) {
  spec.validate();
  const Index N = spec.agents, nb = spec.nbar(), mb = spec.mbar();
  const Matrix eye = Matrix::Identity(N, N);
  const Matrix e = incidence_matrix(spec);
  return LtiSystem(kron(eye, spec.Abar), kron(eye, spec.Bbar), kron(e, Matrix::Identity(nb, nb)),
                   Matrix::Zero(e.rows() * nb, N * mb));
}

Matrix MarkovParams::block(Index k, Index i, Index j, Index rows, Index cols) const {
  if (k < 0 || k > kmax()) throw InputError("MarkovParams: index " + std::to_string(k) + " unavailable");
  const Matrix& mk = M[static_cast<size_t>(k)];
  if ((i + 1) * rows > mk.rows() || (j + 1) * cols > mk.cols() || i < 0 || j < 0) {
    throw InputError("MarkovParams: block (" + std::to_string(i) + ", " + std::to_string(j) +
                     ") out of range");
  }
  return mk.block(i * rows, j * cols, rows, cols);
}

MarkovParams markov_parameters(const LtiSystem& sys, Index kmax) {
  if (kmax < 0) throw InputError("markov_parameters: kmax must be >= 0");
  MarkovParams out;
  out.M.push_back(sys.D());
  Matrix apow_b = sys.B();
  for (Index k = 1; k <= kmax; ++k) {
    out.M.push_back(sys.C() * apow_b);
    apow_b = sys.A() * apow_b;
  }
  return out;
}

MarkovParams kronecker_markov(const MultiAgentSpec& spec, Index kmax) {
  if (kmax < 0) throw InputError("kronecker_markov: kmax must be >= 0");
  const Matrix e = incidence_matrix(spec);
  MarkovParams out;
  out.M.push_back(Matrix::Zero(e.rows() * spec.nbar(), spec.agents * spec.mbar()));
  Matrix apow_b = spec.Bbar;
  for (Index k = 1; k <= kmax; ++k) {
    out.M.push_back(kron(e, apow_b));
    apow_b = spec.Abar * apow_b;
  }
  return out;
}

MarkovResult markov_from_data(const TrajectorySet& data, const MarkovOptions& opts) {
  const Index n = opts.state_dim;
  if (n < 1) throw InputError("markov_from_data: state dimension must be >= 1");
  if (opts.delta < 1) throw InputError("markov_from_data: delta must be >= 1");
  if (opts.kmax < 0 || opts.kmax > n) {
    throw InputError("markov_from_data: kmax must lie in [0, n]");
  }
  if (!data.has_outputs() || data.p() < 1) {
    throw InputError("markov_from_data: data carries no output channel");
  }
  const Index m = data.m(), p = data.p();
  const Index depth = n + 1;

  MarkovResult out;
  out.required_pe_order = opts.delta + depth;
  const TrajectorySet io = [&] {
    std::vector<Trajectory> v;
    for (const Trajectory& t : data) v.push_back(t.without_states());
    return TrajectorySet(std::move(v));
  }();
  const PeCheck pe = check_collective_pe(io, out.required_pe_order);
  if (!pe.exciting) {
    out.verdict = Verdict::hypothesis_violated;
    out.diagnostic = "inputs are not collectively persistently exciting of order " +
                     std::to_string(out.required_pe_order) + " (rank " +
                     std::to_string(pe.rank) + " of " + std::to_string(pe.rows) + ")" +
                     (pe.diagnostic.empty() ? "" : ": " + pe.diagnostic);
    return out;
  }

  const Matrix hu = mosaic_hankel(io, depth, Channel::inputs);
  const Matrix hy = mosaic_hankel(io, depth, Channel::outputs);
  const Index top_rows = depth * m + n * p;
  Matrix top(top_rows, hu.cols());
  top << hu, hy.topRows(n * p);
  const Matrix last = hy.bottomRows(p);

  Eigen::BDCSVD<Matrix> svd(top, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cutoff = opts.rank_tol.resolve(top.rows(), top.cols(), sv.size() ? sv[0] : 0.0);
  Index r = 0;
  while (r < sv.size() && sv[r] > cutoff) ++r;
  const Matrix vr = svd.matrixV().leftCols(r);
  const Matrix ur = svd.matrixU().leftCols(r);
  const Vector inv_s = sv.head(r).cwiseInverse();

  const Matrix unexplained = last - (last * vr) * vr.transpose();
  out.consistency_residual = unexplained.norm() / std::max(last.norm(), 1e-300);
  if (!(out.consistency_residual <= opts.tol)) {
    throw NumericalError("markov_from_data: last output rows are not determined by the data (relative residual " +
                             format_real(out.consistency_residual) + ")",
                         out.consistency_residual);
  }

  const Matrix last_v = last * vr;
  for (Index k = 0; k <= opts.kmax; ++k) {
    Matrix rhs = Matrix::Zero(top_rows, m);
    rhs.block((n - k) * m, 0, m, m) = Matrix::Identity(m, m);
    for (Index j = 0; j < k; ++j) {
      rhs.block(depth * m + (n - k + j) * p, 0, p, m) = out.params.M[static_cast<size_t>(j)];
    }
    const Matrix coeff = inv_s.asDiagonal() * (ur.transpose() * rhs);
    out.params.M.push_back(last_v * coeff);
  }
  out.verdict = Verdict::holds;
  return out;
}

RecoveredSystem recover_system(const MarkovParams& params, const Anchor& anchor, Index nbar,
                               Index mbar, double tol) {
  if (nbar < 1 || mbar < 1) throw InputError("recover_system: nbar and mbar must be >= 1");
  if (params.kmax() < nbar + 1) {
    throw InputError("recover_system: Markov parameters through index " +
                     std::to_string(nbar + 1) + " are required");
  }
  if (anchor.sign != 1 && anchor.sign != -1) throw InputError("recover_system: anchor sign must be +1 or -1");
  const Matrix& m1 = params.M[1];
  if (m1.rows() % nbar != 0 || m1.cols() % mbar != 0) {
    throw InputError("recover_system: M_1 is not partitioned into nbar x mbar blocks");
  }
  const Index edges = m1.rows() / nbar, agents = m1.cols() / mbar;

  RecoveredSystem out;
  out.anchor = anchor;
  out.Bbar_hat = anchor.sign * params.block(1, anchor.edge, anchor.agent, nbar, mbar);
  const double bnorm = out.Bbar_hat.norm();
  if (!(bnorm > 0.0)) throw InputError("recover_system: anchor block of M_1 is zero");

  Matrix stack(nbar, nbar * mbar), shifted(nbar, nbar * mbar);
  for (Index k = 1; k <= nbar; ++k) {
    stack.middleCols((k - 1) * mbar, mbar) = params.block(k, anchor.edge, anchor.agent, nbar, mbar);
    shifted.middleCols((k - 1) * mbar, mbar) =
        params.block(k + 1, anchor.edge, anchor.agent, nbar, mbar);
  }
  out.stack_rank = numerical_rank(stack);
  if (out.stack_rank != nbar) {
    throw NumericalError("recover_system: stacked Markov blocks have rank " +
                             std::to_string(out.stack_rank) + ", need " + std::to_string(nbar) +
                             " for a unique Abar",
                         static_cast<double>(nbar - out.stack_rank));
  }
  out.Abar_hat = least_squares(stack.transpose(), shifted.transpose()).solution.transpose();

  out.E_hat = Matrix::Zero(edges, agents);
  for (Index i = 0; i < edges; ++i) {
    for (Index j = 0; j < agents; ++j) {
      const Matrix blk = params.block(1, i, j, nbar, mbar);
      if (blk.norm() <= 1e-6 * bnorm) continue;
      const double plus = (blk - out.Bbar_hat).norm() / bnorm;
      const double minus = (blk + out.Bbar_hat).norm() / bnorm;
      if (plus <= tol) {
        out.E_hat(i, j) = 1.0;
      } else if (minus <= tol) {
        out.E_hat(i, j) = -1.0;
      } else {
        throw NumericalError("recover_system: block (" + std::to_string(i) + ", " +
                                 std::to_string(j) + ") of M_1 matches neither +Bbar nor -Bbar",
                             std::min(plus, minus));
      }
    }
  }
  return out;
}

std::string_view to_string(OrderRule r) {
  return r == OrderRule::corollary2 ? "corollary2" : "full_n";
}

OrderRule order_rule_from_string(std::string_view s) {
  if (s == "corollary2") return OrderRule::corollary2;
  if (s == "full_n") return OrderRule::full_n;
  throw InputError("unknown order rule '" + std::string(s) + "' (expected corollary2 or full_n)");
}

Index rule_pe_order(OrderRule rule, Index agents, Index nbar) {
  return rule == OrderRule::corollary2 ? (agents + 1) * nbar + 1 : 2 * agents * nbar + 1;
}

Index analytic_trajectory_bound(OrderRule rule, Index agents, Index nbar, Index mbar,
                                Index length) {
  const Index d = rule_pe_order(rule, agents, nbar);
  const Index cols_per = length - d + 1;
  if (cols_per < 1) return -1;
  const Index rows = d * agents * mbar;
  return (rows + cols_per - 1) / cols_per;
}

std::uint64_t trajectory_seed(std::uint64_t seed, Index i) {
  // splitmix64 finalizer over (seed, i)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(i) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

TrajectorySet generate_data(const LtiSystem& sys, Index tau, Index length, double low,
                            double high, std::uint64_t seed) {
  if (tau < 1) throw InputError("generate_data: need at least one trajectory");
  std::vector<Trajectory> v;
  const Vector x0 = Vector::Zero(sys.n());
  for (Index i = 0; i < tau; ++i) {
    v.push_back(simulate(sys, x0, random_input(sys.m(), length, low, high, trajectory_seed(seed, i))));
  }
  return TrajectorySet(std::move(v));
}

std::vector<SweepRow> min_trajectory_sweep(const Matrix& Abar, const Matrix& Bbar,
                                           const std::vector<Index>& agent_counts,
                                           OrderRule rule, std::uint64_t seed,
                                           const SweepOptions& opts) {
  std::vector<SweepRow> rows;
  for (const Index N : agent_counts) {
    const auto start = std::chrono::steady_clock::now();
    MultiAgentSpec spec{Abar, Bbar, N, star_edges(N)};
    const LtiSystem sys = build_system(spec);
    SweepRow row;
    row.agents = N;
    row.rule = rule;
    row.pe_order = rule_pe_order(rule, N, spec.nbar());
    row.analytic_bound = analytic_trajectory_bound(rule, N, spec.nbar(), spec.mbar(), opts.length);
    if (row.analytic_bound >= 1) {
      std::vector<Trajectory> inputs;
      double peak = 0.0;
      auto add_until = [&](Index tau) {
        while (static_cast<Index>(inputs.size()) < tau) {
          const Index i = static_cast<Index>(inputs.size());
          Trajectory t = simulate(sys, Vector::Zero(sys.n()),
                                  random_input(sys.m(), opts.length, opts.input_low,
                                               opts.input_high, trajectory_seed(seed, i)));
          peak = std::max(peak, t.states().colwise().norm().maxCoeff());
          inputs.emplace_back(t.inputs(), std::nullopt, std::nullopt);
        }
      };
      for (Index tau = row.analytic_bound; tau <= row.analytic_bound + opts.max_extra; ++tau) {
        add_until(tau);
        if (is_collectively_pe(TrajectorySet(inputs), row.pe_order)) {
          row.tau_min = tau;
          break;
        }
      }
      if (peak > opts.state_warning) {
        row.warning = "state norm reached " + format_real(peak);
      }
    }
    row.elapsed_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows, bool record_timing) {
  std::ostringstream os;
  os << "N,rule,tau_min,analytic_bound,pe_order,elapsed_ms\n";
  for (const SweepRow& r : rows) {
    os << r.agents << ',' << to_string(r.rule) << ',' << r.tau_min << ',' << r.analytic_bound
       << ',' << r.pe_order << ',' << format_real(record_timing ? r.elapsed_ms : 0.0) << '\n';
  }
  return os.str();
}

std::vector<SweepRow> read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "N,rule,tau_min,analytic_bound,pe_order,elapsed_ms") {
    throw InputError("sweep CSV: unexpected header");
  }
  std::vector<SweepRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) throw InputError("sweep CSV: wrong field count");
    try {
      SweepRow r;
      r.agents = std::stoll(f[0]);
      r.rule = order_rule_from_string(f[1]);
      r.tau_min = std::stoll(f[2]);
      r.analytic_bound = std::stoll(f[3]);
      r.pe_order = std::stoll(f[4]);
      r.elapsed_ms = std::stod(f[5]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw InputError("sweep CSV: cannot parse '" + line + "'");
    }
  }
  return rows;
}

IdentificationReport identify_network(const MultiAgentSpec& spec, const Anchor& anchor,
                                      Index tau, const SweepOptions& data_opts,
                                      std::uint64_t seed, double tol) {
  if (spec.edges.empty()) throw InputError("identify_network: network has no edges, so no outputs");
  const LtiSystem sys = build_system(spec);
  const Index nb = spec.nbar(), mb = spec.mbar();
  const Matrix e = incidence_matrix(spec);
  if (anchor.edge < 0 || anchor.edge >= e.rows() || anchor.agent < 0 || anchor.agent >= e.cols() ||
      e(anchor.edge, anchor.agent) != anchor.sign) {
    throw InputError("identify_network: anchor does not name an entry of E with the given sign");
  }

  IdentificationReport out;
  out.trajectories = tau;
  const TrajectorySet data = generate_data(sys, tau, data_opts.length, data_opts.input_low,
                                           data_opts.input_high, seed);
  MarkovOptions mo;
  mo.state_dim = sys.n();
  mo.delta = nb;
  mo.kmax = nb + 1;
  mo.tol = tol;
  const MarkovResult mr = markov_from_data(data, mo);
  out.verdict = mr.verdict;
  out.diagnostic = mr.diagnostic;
  if (mr.verdict == Verdict::hypothesis_violated) return out;
  out.consistency_residual = mr.consistency_residual;

  const MarkovParams truth = kronecker_markov(spec, nb + 1);
  double worst = 0.0;
  for (Index k = 1; k <= nb + 1; ++k) {
    const double err = (mr.params.M[static_cast<size_t>(k)] - truth.M[static_cast<size_t>(k)]).norm();
    out.markov_errors.push_back(err);
    worst = std::max(worst, err);
  }
  out.recovered = recover_system(mr.params, anchor, nb, mb, tol);
  out.abar_error = (out.recovered.Abar_hat - spec.Abar).norm();
  out.bbar_error = (out.recovered.Bbar_hat - spec.Bbar).norm();
  out.e_error = (out.recovered.E_hat - e).norm();
  worst = std::max({worst, out.abar_error, out.bbar_error, out.e_error});
  out.verdict = worst <= tol ? Verdict::holds : Verdict::fails;
  if (out.verdict == Verdict::fails) {
    out.diagnostic = "largest identification error " + format_real(worst) + " exceeds " + format_real(tol);
  }
  return out;
}

}  // namespace willems
