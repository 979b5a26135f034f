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

#include "willems/commands.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "willems/config.hpp"
#include "willems/hankel.hpp"
#include "willems/multiagent.hpp"
#include "willems/parameterize.hpp"
#include "willems/predictive.hpp"
#include "willems/subspace.hpp"
#include "willems/trajectory_io.hpp"

namespace willems {

namespace {

int exit_code_for(StepStatus s) {
  switch (s) {
    case StepStatus::optimal:
      return kExitOk;
    case StepStatus::hypothesis_violated:
      return kExitHypothesis;
    case StepStatus::infeasible:
      return kExitInfeasible;
    case StepStatus::solver_failure:
      return kExitNumerical;
  }
  return kExitNumerical;
}

int worse(int a, int b) {
  // Precedence when several runs end differently.
  auto rank = [](int c) {
    switch (c) {
      case kExitOk:
        return 0;
      case kExitHypothesis:
        return 1;
      case kExitInfeasible:
        return 2;
      default:
        return 3;
    }
  };
  return rank(a) >= rank(b) ? a : b;
}

}  // namespace

int cmd_verify_theorem1(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  Theorem1Config cfg = load_theorem1_config(opts.config);
  if (opts.seed) cfg.seed = *opts.seed;
  const LtiSystem sys = cfg.system ? *cfg.system : random_system(*cfg.recipe, cfg.seed);
  const Index n = sys.n(), m = sys.m();
  const Matrix x0s = cfg.initial_states.size() ? cfg.initial_states
                                               : Matrix::Zero(n, cfg.trajectories);

  std::vector<Trajectory> runs;
  for (Index i = 0; i < cfg.trajectories; ++i) {
    runs.push_back(simulate(sys, x0s.col(i),
                            random_input(m, cfg.length, cfg.input_low, cfg.input_high,
                                         trajectory_seed(cfg.seed, i))));
  }
  const TrajectorySet data(runs);

  ImageCheckOptions io;
  io.delta = cfg.delta;
  const ImageCheckReport image = theorem1_image_check(sys, data, cfg.horizon, io);

  std::ostringstream report;
  report << "check,index,verdict,residual,detail\n";
  out << "system: n = " << n << ", m = " << m << ", p = " << sys.p() << "; tau = "
      << cfg.trajectories << ", T = " << cfg.length << ", L = " << cfg.horizon
      << ", delta = " << image.delta << "\n";
  if (image.verdict == Verdict::hypothesis_violated) {
    report << "image,0,hypothesis_violated,nan," << "order " << image.required_pe_order << '\n';
    write_file_atomic(opts.out_dir / "theorem1_report.csv", report.str());
    out << "image check: hypothesis violated (" << image.diagnostic << "); no verdict\n";
    return kExitHypothesis;
  }
  report << "image,0," << to_string(image.verdict) << ',' << format_real(image.residual)
         << ",dim " << image.image_dim << " vs " << image.target_dim << '\n';
  out << "image check: " << to_string(image.verdict) << " (residual "
      << format_real(image.residual) << ", dim " << image.image_dim << " vs "
      << image.target_dim << ")\n";

  std::vector<Trajectory> io_runs;
  for (const Trajectory& t : data) io_runs.push_back(t.without_states());
  const TrajectorySet io_data(io_runs);

  bool consistent = image.verdict == Verdict::holds;
  for (size_t k = 0; k < cfg.test_states.size(); ++k) {
    const Vector& xbar = cfg.test_states[k];
    const bool in_span = theorem1_state_condition(sys, data, xbar);
    const Trajectory target = simulate(
        sys, xbar,
        random_input(m, cfg.horizon, cfg.input_low, cfg.input_high,
                     trajectory_seed(cfg.seed ^ 0x5bd1e995ULL, static_cast<Index>(k))));
    const ParamSolution sol = parameterize(io_data, target.without_states());
    const bool agree = in_span == sol.parameterizable;
    consistent = consistent && agree;
    report << "state," << k << ',' << (agree ? "holds" : "fails") << ','
           << format_real(sol.relative_residual) << ','
           << (in_span ? "in R+O+K" : "outside R+O+K") << '\n';
    out << "test state " << k << ": " << (in_span ? "in" : "outside")
        << " R+O+K, parameterization residual " << format_real(sol.relative_residual)
        << (agree ? "" : "  <-- disagrees") << "\n";
  }
  write_file_atomic(opts.out_dir / "theorem1_report.csv", report.str());
  if (!consistent) {
    err << "verify-theorem1: numerical checks disagree with the theorem\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_deepc(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  DeepcConfig cfg = load_deepc_config(opts.config);
  if (opts.seed) cfg.seed = *opts.seed;
  int code = kExitOk;
  std::vector<ClosedLoopLog> logs;
  for (const Controller c : cfg.controllers) {
    ClosedLoopLog log = run_closed_loop(cfg.system, cfg.predictive, c, cfg.seed);
    const std::string name = "closed_loop_" + std::string(to_string(c)) + ".csv";
    write_file_atomic(opts.out_dir / name, closed_loop_to_csv(log, opts.record_timing));
    out << to_string(c) << ": " << log.entries.size() << " samples, excitation draws "
        << log.excitation_attempts;
    if (log.aborted) {
      out << ", aborted (" << to_string(log.abort_status) << ")\n";
      err << to_string(c) << ": " << log.abort_reason << '\n';
      code = worse(code, exit_code_for(log.abort_status));
    } else {
      out << ", final output [";
      const Vector y = log.entries.back().y;
      for (Index i = 0; i < y.size(); ++i) out << (i ? ", " : "") << format_real(y[i]);
      out << "]\n";
    }
    if (logs.empty()) write_file_atomic(opts.out_dir / "reference.csv", reference_to_csv(log));
    logs.push_back(std::move(log));
  }
  if (logs.size() == 2) {
    const ClosedLoopLog& a = logs[0];
    const ClosedLoopLog& b = logs[1];
    const size_t rows = std::min(a.entries.size(), b.entries.size());
    const Index m = cfg.system.m();
    std::ostringstream os;
    os << "t,phase";
    for (Index i = 0; i < m; ++i) os << ",du_" << i;
    os << ",max_abs_du\n";
    double worst = 0.0;
    for (size_t r = 0; r < rows; ++r) {
      const Vector du = a.entries[r].u - b.entries[r].u;
      const double mx = du.size() ? du.cwiseAbs().maxCoeff() : 0.0;
      worst = std::max(worst, mx);
      os << a.entries[r].t << ',' << (a.entries[r].control ? "control" : "excitation");
      for (Index i = 0; i < m; ++i) os << ',' << format_real(du[i]);
      os << ',' << format_real(mx) << '\n';
    }
    write_file_atomic(opts.out_dir / "input_difference.csv", os.str());
    out << "max per-step input difference (mpc - deepc): " << format_real(worst) << '\n';
  }
  return code;
}

int cmd_identify(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  IdentifyConfig cfg = load_identify_config(opts.config);
  if (opts.seed) cfg.seed = *opts.seed;
  int code = kExitOk;

  std::vector<SweepRow> first_corollary;
  for (Index s = 0; s < cfg.seeds; ++s) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(s);
    std::vector<SweepRow> rows;
    for (const OrderRule rule : {OrderRule::corollary2, OrderRule::full_n}) {
      std::vector<SweepRow> r = min_trajectory_sweep(cfg.Abar, cfg.Bbar, cfg.agent_counts, rule,
                                                     seed, cfg.sweep);
      if (s == 0 && rule == OrderRule::corollary2) first_corollary = r;
      rows.insert(rows.end(), r.begin(), r.end());
    }
    Index matches = 0;
    for (const SweepRow& r : rows) {
      if (!r.warning.empty()) err << "sweep N = " << r.agents << ": " << r.warning << '\n';
      if (r.tau_min >= 0 && r.tau_min == r.analytic_bound) ++matches;
    }
    const std::string name =
        cfg.seeds == 1 ? "sweep.csv" : "sweep_seed_" + std::to_string(seed) + ".csv";
    write_file_atomic(opts.out_dir / name, sweep_to_csv(rows, opts.record_timing));
    out << "sweep seed " << seed << ": tau_min equals the analytic bound at " << matches
        << " of " << rows.size() << " points\n";
  }

  std::ostringstream report;
  report << "N,trajectories,verdict,max_markov_error,abar_error,bbar_error,e_error,"
            "consistency_residual\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (size_t idx = 0; idx < cfg.agent_counts.size(); ++idx) {
    const Index N = cfg.agent_counts[idx];
    auto skipped = [&](const std::string& why) {
      report << N << ",0,skipped";
      for (int i = 0; i < 5; ++i) report << ',' << format_real(nan);
      report << '\n';
      out << "identify N = " << N << ": skipped (" << why << ")\n";
    };
    if (N < 2) {
      skipped("a single agent has no edges, hence no output channel");
      continue;
    }
    const Index tau = first_corollary[idx].tau_min;
    if (tau < 1) {
      skipped("no trajectory count passed the excitation check");
      continue;
    }
    const MultiAgentSpec spec{cfg.Abar, cfg.Bbar, N, star_edges(N)};
    IdentificationReport rep;
    try {
      rep = identify_network(spec, cfg.anchor, tau, cfg.sweep, cfg.seed, cfg.tol);
    } catch (const NumericalError& e) {
      report << N << ',' << tau << ",numerical_failure";
      for (int i = 0; i < 4; ++i) report << ',' << format_real(nan);
      report << ',' << format_real(e.residual()) << '\n';
      err << "identify N = " << N << ": " << e.what() << '\n';
      code = worse(code, kExitNumerical);
      continue;
    } catch (const InputError& e) {
      throw InputError("identify N = " + std::to_string(N) + ": " + e.what());
    }
    double mk = 0.0;
    for (double e : rep.markov_errors) mk = std::max(mk, e);
    if (rep.verdict == Verdict::hypothesis_violated) mk = nan;
    report << N << ',' << tau << ',' << to_string(rep.verdict) << ',' << format_real(mk) << ','
           << format_real(rep.abar_error) << ',' << format_real(rep.bbar_error) << ','
           << format_real(rep.e_error) << ',' << format_real(rep.consistency_residual) << '\n';
    out << "identify N = " << N << " (tau = " << tau << "): " << to_string(rep.verdict);
    if (rep.verdict != Verdict::hypothesis_violated) {
      out << ", Markov error " << format_real(mk) << ", Abar error "
          << format_real(rep.abar_error) << ", Bbar error " << format_real(rep.bbar_error)
          << ", E error " << format_real(rep.e_error);
    }
    out << '\n';
    if (!rep.diagnostic.empty()) err << "identify N = " << N << ": " << rep.diagnostic << '\n';
    if (rep.verdict == Verdict::hypothesis_violated) code = worse(code, kExitHypothesis);
    if (rep.verdict == Verdict::fails) code = worse(code, kExitNumerical);
  }
  write_file_atomic(opts.out_dir / "identification.csv", report.str());
  return code;
}

int cmd_check_pe(const CommandOptions& opts, std::ostream& out, std::ostream&) {
  const CheckPeConfig cfg = load_check_pe_config(opts.config);
  std::vector<Trajectory> runs;
  for (const auto& p : cfg.trajectories) runs.push_back(read_trajectory_csv(p));
  const TrajectorySet set(runs);
  out << "pe_order " << pe_order(set) << '\n';
  if (cfg.depth) {
    const PeCheck pe = check_collective_pe(set, *cfg.depth);
    out << "order " << *cfg.depth << ": " << (pe.exciting ? "exciting" : "not exciting")
        << " (rank " << pe.rank << " of " << pe.rows << ")\n";
    if (!pe.exciting) return kExitHypothesis;
  }
  return kExitOk;
}

int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream&) {
  const SimulateConfig cfg = load_simulate_config(opts.config);
  const Trajectory inputs = read_trajectory_csv(cfg.inputs);
  if (inputs.m() != cfg.system.m()) {
    throw InputError("simulate: input file has " + std::to_string(inputs.m()) +
                     " channels, system has m = " + std::to_string(cfg.system.m()));
  }
  Trajectory traj = simulate(cfg.system, cfg.x0, inputs.inputs());
  if (!cfg.include_states) traj = traj.without_states();
  write_file_atomic(opts.out_dir / cfg.output, trajectory_to_csv(traj));
  out << "wrote " << (opts.out_dir / cfg.output).string() << " (" << traj.length()
      << " samples)\n";
  return kExitOk;
}

int run_command(const std::string& name, const CommandOptions& opts, std::ostream& out,
                std::ostream& err) {
  try {
    if (name == "verify-theorem1") return cmd_verify_theorem1(opts, out, err);
    if (name == "deepc") return cmd_deepc(opts, out, err);
    if (name == "identify") return cmd_identify(opts, out, err);
    if (name == "check-pe") return cmd_check_pe(opts, out, err);
    if (name == "simulate") return cmd_simulate(opts, out, err);
    err << "unknown command '" << name << "'\n";
    return kExitUsage;
  } catch (const InputError& e) {
    err << name << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << name << ": " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << name << ": " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace willems
