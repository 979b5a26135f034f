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

#include "willems/trajectory_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace willems {

std::string format_real(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, static_cast<size_t>(len));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t";
  for (Index i = 0; i < traj.m(); ++i) os << ",u_" << i;
  for (Index i = 0; i < traj.n(); ++i) os << ",x_" << i;
  for (Index i = 0; i < traj.p(); ++i) os << ",y_" << i;
  os << '\n';
  for (Index t = 0; t < traj.length(); ++t) {
    os << t;
    for (Index i = 0; i < traj.m(); ++i) os << ',' << format_real(traj.inputs()(i, t));
    for (Index i = 0; i < traj.n(); ++i) os << ',' << format_real(traj.states()(i, t));
    for (Index i = 0; i < traj.p(); ++i) os << ',' << format_real(traj.outputs()(i, t));
    os << '\n';
  }
}

std::string trajectory_to_csv(const Trajectory& traj) {
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  return os.str();
}

namespace {

double parse_real(const std::string& s, Index row) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw InputError("trajectory CSV row " + std::to_string(row) +
                     ": cannot parse '" + s + "' as a number");
  }
  return v;
}

// Index of the channel for a header field like "u_3", or -1.
Index channel_index(const std::string& field, char prefix) {
  if (field.size() < 3 || field[0] != prefix || field[1] != '_') return -1;
  Index idx = 0;
  auto [ptr, ec] = std::from_chars(field.data() + 2, field.data() + field.size(), idx);
  if (ec != std::errc() || ptr != field.data() + field.size()) return -1;
  return idx;
}

}  // namespace

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("trajectory CSV: missing header");
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "t") {
    throw InputError("trajectory CSV: header must start with 't'");
  }
  Index m = 0, n = 0, p = 0;
  // Channels must appear as a contiguous u block, then x, then y.
  int stage = 0;
  for (size_t c = 1; c < header.size(); ++c) {
    const std::string& h = header[c];
    if (channel_index(h, 'u') == m && stage == 0) {
      ++m;
    } else if (channel_index(h, 'x') == n && stage <= 1) {
      stage = 1;
      ++n;
    } else if (channel_index(h, 'y') == p && stage <= 2) {
      stage = 2;
      ++p;
    } else {
      throw InputError("trajectory CSV: unexpected header field '" + h + "'");
    }
  }
  if (m == 0) throw InputError("trajectory CSV: no input columns");

  std::vector<std::vector<double>> rows;
  Index row = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw InputError("trajectory CSV row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    if (parse_real(fields[0], row) != static_cast<double>(row)) {
      throw InputError("trajectory CSV row " + std::to_string(row) + ": time index out of sequence");
    }
    std::vector<double> values;
    values.reserve(fields.size() - 1);
    for (size_t c = 1; c < fields.size(); ++c) values.push_back(parse_real(fields[c], row));
    rows.push_back(std::move(values));
    ++row;
  }
  const Index T = static_cast<Index>(rows.size());
  if (T == 0) throw InputError("trajectory CSV: no data rows");

  Matrix u(m, T), x(n, T), y(p, T);
  for (Index t = 0; t < T; ++t) {
    const auto& r = rows[static_cast<size_t>(t)];
    for (Index i = 0; i < m; ++i) u(i, t) = r[static_cast<size_t>(i)];
    for (Index i = 0; i < n; ++i) x(i, t) = r[static_cast<size_t>(m + i)];
    for (Index i = 0; i < p; ++i) y(i, t) = r[static_cast<size_t>(m + n + i)];
  }
  std::optional<Matrix> xs, ys;
  if (n > 0) xs = std::move(x);
  if (p > 0) ys = std::move(y);
  return Trajectory(std::move(u), std::move(xs), std::move(ys));
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return read_trajectory_csv(in);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw InputError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace willems
