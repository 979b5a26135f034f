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

#include "willems/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>

#include <json.hpp>

#include "willems/trajectory_io.hpp"

namespace willems {

namespace {

using Json = nlohmann::json;

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw InputError("config field '" + field + "' " + what);
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  try {
    Json j = Json::parse(in, nullptr, true, true);
    if (!j.is_object()) throw InputError("config file " + path.string() + " is not a JSON object");
    return j;
  } catch (const Json::parse_error& e) {
    throw InputError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
}

void allow_only(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "description" || it.key() == "comment") continue;
    if (!allowed.count(it.key())) {
      bad(where.empty() ? it.key() : where + "." + it.key(), "is not recognized");
    }
  }
}

const Json& require(const Json& j, const std::string& key, const std::string& where = "") {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) bad(where.empty() ? key : where + "." + key, "is required");
  return *it;
}

double as_number(const Json& v, const std::string& field) {
  if (!v.is_number()) bad(field, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(field, "must be finite");
  return x;
}

Index as_count(const Json& v, const std::string& field, Index min_value = 0) {
  if (!v.is_number_integer()) bad(field, "must be an integer");
  const auto x = v.get<long long>();
  if (x < min_value) bad(field, "must be >= " + std::to_string(min_value));
  return static_cast<Index>(x);
}

std::uint64_t as_seed(const Json& v, const std::string& field) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    bad(field, "must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool as_bool(const Json& v, const std::string& field) {
  if (!v.is_boolean()) bad(field, "must be true or false");
  return v.get<bool>();
}

Vector as_vector(const Json& v, const std::string& field) {
  if (v.is_number()) return Vector::Constant(1, as_number(v, field));
  if (!v.is_array()) bad(field, "must be an array of numbers");
  Vector out(static_cast<Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) {
    out[static_cast<Index>(i)] = as_number(v[i], field + "[" + std::to_string(i) + "]");
  }
  return out;
}

Matrix as_matrix(const Json& v, const std::string& field) {
  if (!v.is_array()) bad(field, "must be a nested array (row-major)");
  if (v.empty()) return Matrix();
  if (!v[0].is_array()) bad(field, "must be a nested array (row-major)");
  const Index rows = static_cast<Index>(v.size());
  const Index cols = static_cast<Index>(v[0].size());
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = v[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      bad(field, "row " + std::to_string(i) + " does not have " + std::to_string(cols) + " entries");
    }
    for (Index c = 0; c < cols; ++c) {
      out(i, c) = as_number(row[static_cast<size_t>(c)],
                            field + "[" + std::to_string(i) + "][" + std::to_string(c) + "]");
    }
  }
  return out;
}

// A scalar w stands for w I.
Matrix as_weight(const Json& v, const std::string& field, Index dim) {
  if (v.is_number()) return Matrix::Identity(dim, dim) * as_number(v, field);
  return as_matrix(v, field);
}

std::pair<double, double> as_range(const Json& v, const std::string& field) {
  const Vector r = as_vector(v, field);
  if (r.size() != 2 || !(r[0] < r[1])) bad(field, "must be [low, high] with low < high");
  return {r[0], r[1]};
}

LtiSystem as_system(const Json& v, const std::string& field) {
  if (!v.is_object()) bad(field, "must be an object with A, B, C and optional D");
  allow_only(v, field, {"A", "B", "C", "D"});
  const Matrix a = as_matrix(require(v, "A", field), field + ".A");
  const Matrix b = as_matrix(require(v, "B", field), field + ".B");
  const Matrix c = as_matrix(require(v, "C", field), field + ".C");
  const Matrix d = v.contains("D") && !v["D"].is_null() ? as_matrix(v["D"], field + ".D")
                                                         : Matrix::Zero(c.rows(), b.cols());
  try {
    return LtiSystem(a, b, c, d);
  } catch (const InputError& e) {
    bad(field, e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& config, const Json& v,
                              const std::string& field) {
  if (!v.is_string()) bad(field, "must be a path string");
  std::filesystem::path p(v.get<std::string>());
  if (p.is_relative()) p = config.parent_path() / p;
  return p;
}

template <typename T>
T value_or(const Json& j, const std::string& key, T fallback,
           T (*conv)(const Json&, const std::string&)) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return conv(*it, key);
}

Index count_or(const Json& j, const std::string& key, Index fallback, Index min_value) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return as_count(*it, key, min_value);
}

Vector optional_vector(const Json& j, const std::string& key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return Vector();
  return as_vector(*it, key);
}

}  // namespace

Theorem1Config load_theorem1_config(const std::filesystem::path& path) {
  const Json j = load_json(path);
  allow_only(j, "", {"system", "random_system", "trajectories", "length", "horizon", "delta",
                     "initial_states", "input_range", "test_states", "seed"});
  Theorem1Config cfg;
  if (j.contains("system") == j.contains("random_system")) {
    bad("system", "exactly one of 'system' and 'random_system' must be given");
  }
  Index n = 0;
  if (j.contains("system")) {
    cfg.system = as_system(j["system"], "system");
    n = cfg.system->n();
  } else {
    const Json& r = j["random_system"];
    if (!r.is_object()) bad("random_system", "must be an object");
    allow_only(r, "random_system", {"n", "m", "p", "controllable_dim", "unobservable_dim",
                                    "scalar_uncontrollable", "feedthrough"});
    RandomSystemRecipe rec;
    rec.n = as_count(require(r, "n", "random_system"), "random_system.n", 1);
    rec.m = as_count(require(r, "m", "random_system"), "random_system.m", 1);
    rec.p = as_count(require(r, "p", "random_system"), "random_system.p", 1);
    if (r.contains("controllable_dim")) {
      rec.controllable_dim = as_count(r["controllable_dim"], "random_system.controllable_dim");
      if (rec.controllable_dim > rec.n) bad("random_system.controllable_dim", "must be <= n");
    }
    if (r.contains("unobservable_dim")) {
      rec.unobservable_dim = as_count(r["unobservable_dim"], "random_system.unobservable_dim");
      const Index ctrl = rec.controllable_dim < 0 ? rec.n : rec.controllable_dim;
      if (rec.unobservable_dim > ctrl) bad("random_system.unobservable_dim", "must be <= controllable_dim");
    }
    if (r.contains("scalar_uncontrollable")) {
      rec.scalar_uncontrollable = as_bool(r["scalar_uncontrollable"], "random_system.scalar_uncontrollable");
    }
    if (r.contains("feedthrough")) rec.feedthrough = as_bool(r["feedthrough"], "random_system.feedthrough");
    cfg.recipe = rec;
    n = rec.n;
  }
  cfg.trajectories = count_or(j, "trajectories", 1, 1);
  cfg.length = count_or(j, "length", 30, 1);
  cfg.horizon = count_or(j, "horizon", 3, 1);
  if (cfg.horizon > cfg.length) bad("horizon", "must not exceed 'length'");
  if (j.contains("delta") && !j["delta"].is_null()) cfg.delta = as_count(j["delta"], "delta", 1);
  if (j.contains("input_range")) std::tie(cfg.input_low, cfg.input_high) = as_range(j["input_range"], "input_range");
  if (j.contains("initial_states") && !j["initial_states"].is_null()) {
    const Matrix rows = as_matrix(j["initial_states"], "initial_states");
    if (rows.rows() != cfg.trajectories || rows.cols() != n) {
      bad("initial_states", "must list " + std::to_string(cfg.trajectories) +
                                " initial states of dimension " + std::to_string(n));
    }
    cfg.initial_states = rows.transpose();
  }
  if (j.contains("test_states")) {
    const Json& ts = j["test_states"];
    if (!ts.is_array()) bad("test_states", "must be an array of state vectors");
    for (size_t i = 0; i < ts.size(); ++i) {
      const std::string f = "test_states[" + std::to_string(i) + "]";
      Vector v = as_vector(ts[i], f);
      if (v.size() != n) bad(f, "must have dimension " + std::to_string(n));
      cfg.test_states.push_back(std::move(v));
    }
  }
  cfg.seed = value_or<std::uint64_t>(j, "seed", 0, as_seed);
  return cfg;
}

DeepcConfig load_deepc_config(const std::filesystem::path& path) {
  const Json j = load_json(path);
  allow_only(j, "", {"system", "controller", "N", "L", "T", "K", "Q", "R", "reference",
                     "u_min", "u_max", "y_min", "y_max", "excitation", "x0", "delta",
                     "g_ridge", "qp_tol", "qp_max_iter", "seed"});
  DeepcConfig cfg{as_system(require(j, "system"), "system"), {}, {}, 0};
  const Index m = cfg.system.m(), p = cfg.system.p(), n = cfg.system.n();

  const std::string ctrl = j.value("controller", std::string("both"));
  if (ctrl == "mpc") {
    cfg.controllers = {Controller::mpc};
  } else if (ctrl == "deepc") {
    cfg.controllers = {Controller::deepc};
  } else if (ctrl == "both") {
    cfg.controllers = {Controller::mpc, Controller::deepc};
  } else {
    bad("controller", "must be \"mpc\", \"deepc\" or \"both\"");
  }

  PredictiveConfig& pc = cfg.predictive;
  pc.past = count_or(j, "N", pc.past, 0);
  pc.horizon = count_or(j, "L", pc.horizon, 1);
  pc.data_length = count_or(j, "T", pc.data_length, 1);
  pc.run_length = count_or(j, "K", pc.run_length, 1);
  if (pc.data_length < pc.past) bad("T", "must be >= N");
  if (pc.run_length < pc.data_length) bad("K", "must be >= T");
  pc.Q = j.contains("Q") ? as_weight(j["Q"], "Q", p) : Matrix::Identity(p, p);
  pc.R = j.contains("R") ? as_weight(j["R"], "R", m) : Matrix::Identity(m, m);
  const Json& ref = require(j, "reference");
  if (ref.is_array() && !ref.empty() && ref[0].is_array()) {
    pc.reference = as_matrix(ref, "reference");
  } else {
    pc.reference = as_vector(ref, "reference");
  }
  pc.u_min = optional_vector(j, "u_min");
  pc.u_max = optional_vector(j, "u_max");
  pc.y_min = optional_vector(j, "y_min");
  pc.y_max = optional_vector(j, "y_max");
  if (j.contains("excitation")) {
    std::tie(pc.excitation_low, pc.excitation_high) = as_range(j["excitation"], "excitation");
  }
  pc.x0 = optional_vector(j, "x0");
  if (pc.x0.size() != 0 && pc.x0.size() != n) bad("x0", "must have dimension " + std::to_string(n));
  pc.delta = count_or(j, "delta", 0, 0);
  if (j.contains("g_ridge")) pc.g_ridge = as_number(j["g_ridge"], "g_ridge");
  if (j.contains("qp_tol")) {
    pc.qp.tol = as_number(j["qp_tol"], "qp_tol");
    if (!(pc.qp.tol > 0)) bad("qp_tol", "must be positive");
  }
  if (j.contains("qp_max_iter")) pc.qp.max_iter = static_cast<int>(as_count(j["qp_max_iter"], "qp_max_iter", 1));
  cfg.seed = value_or<std::uint64_t>(j, "seed", 0, as_seed);
  pc.validate(m, p);
  return cfg;
}

IdentifyConfig load_identify_config(const std::filesystem::path& path) {
  const Json j = load_json(path);
  allow_only(j, "", {"Abar", "Bbar", "agents", "T", "input_range", "anchor", "tol", "seeds",
                     "seed", "max_extra"});
  IdentifyConfig cfg;
  cfg.Abar = as_matrix(require(j, "Abar"), "Abar");
  cfg.Bbar = as_matrix(require(j, "Bbar"), "Bbar");
  try {
    MultiAgentSpec{cfg.Abar, cfg.Bbar, 1, {}}.validate();
  } catch (const InputError& e) {
    bad("Abar", e.what());
  }
  const Json& agents = require(j, "agents");
  if (agents.is_object()) {
    allow_only(agents, "agents", {"from", "to"});
    const Index from = as_count(require(agents, "from", "agents"), "agents.from", 1);
    const Index to = as_count(require(agents, "to", "agents"), "agents.to", 1);
    if (to < from) bad("agents.to", "must be >= agents.from");
    for (Index n = from; n <= to; ++n) cfg.agent_counts.push_back(n);
  } else if (agents.is_array()) {
    for (size_t i = 0; i < agents.size(); ++i) {
      cfg.agent_counts.push_back(as_count(agents[i], "agents[" + std::to_string(i) + "]", 1));
    }
    if (cfg.agent_counts.empty()) bad("agents", "must not be empty");
  } else {
    cfg.agent_counts.push_back(as_count(agents, "agents", 1));
  }
  cfg.sweep.length = count_or(j, "T", 120, 1);
  if (j.contains("input_range")) {
    std::tie(cfg.sweep.input_low, cfg.sweep.input_high) = as_range(j["input_range"], "input_range");
  }
  cfg.sweep.max_extra = count_or(j, "max_extra", cfg.sweep.max_extra, 0);
  if (j.contains("anchor")) {
    const Json& a = j["anchor"];
    if (!a.is_object()) bad("anchor", "must be an object with edge, agent and sign");
    allow_only(a, "anchor", {"edge", "agent", "sign"});
    cfg.anchor.edge = as_count(require(a, "edge", "anchor"), "anchor.edge");
    cfg.anchor.agent = as_count(require(a, "agent", "anchor"), "anchor.agent");
    const Json& s = require(a, "sign", "anchor");
    if (!s.is_number_integer() || (s.get<int>() != 1 && s.get<int>() != -1)) bad("anchor.sign", "must be 1 or -1");
    cfg.anchor.sign = s.get<int>();
  }
  if (j.contains("tol")) {
    cfg.tol = as_number(j["tol"], "tol");
    if (!(cfg.tol > 0)) bad("tol", "must be positive");
  }
  cfg.seeds = count_or(j, "seeds", 1, 1);
  cfg.seed = value_or<std::uint64_t>(j, "seed", 0, as_seed);
  return cfg;
}

CheckPeConfig load_check_pe_config(const std::filesystem::path& path) {
  CheckPeConfig cfg;
  if (path.extension() == ".csv") {
    cfg.trajectories.push_back(path);
    return cfg;
  }
  const Json j = load_json(path);
  allow_only(j, "", {"trajectories", "depth"});
  const Json& t = require(j, "trajectories");
  if (t.is_string()) {
    cfg.trajectories.push_back(resolve(path, t, "trajectories"));
  } else if (t.is_array() && !t.empty()) {
    for (size_t i = 0; i < t.size(); ++i) {
      cfg.trajectories.push_back(resolve(path, t[i], "trajectories[" + std::to_string(i) + "]"));
    }
  } else {
    bad("trajectories", "must be a path or a non-empty array of paths");
  }
  if (j.contains("depth")) cfg.depth = as_count(j["depth"], "depth", 1);
  return cfg;
}

SimulateConfig load_simulate_config(const std::filesystem::path& path) {
  const Json j = load_json(path);
  allow_only(j, "", {"system", "x0", "inputs", "include_states", "output"});
  SimulateConfig cfg{as_system(require(j, "system"), "system"), {}, {}, true, "trajectory.csv"};
  cfg.x0 = optional_vector(j, "x0");
  if (cfg.x0.size() == 0) cfg.x0 = Vector::Zero(cfg.system.n());
  if (cfg.x0.size() != cfg.system.n()) bad("x0", "must have dimension " + std::to_string(cfg.system.n()));
  cfg.inputs = resolve(path, require(j, "inputs"), "inputs");
  if (j.contains("include_states")) cfg.include_states = as_bool(j["include_states"], "include_states");
  if (j.contains("output")) {
    if (!j["output"].is_string() || j["output"].get<std::string>().empty()) bad("output", "must be a file name");
    cfg.output = j["output"].get<std::string>();
  }
  return cfg;
}

}  // namespace willems
