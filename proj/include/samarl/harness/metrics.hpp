// Copyright 2026 The samarl Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Step-level metrics CSV. Floats are written with 9 significant digits;
// a step where no agent trained has mean_loss "nan".

#ifndef SAMARL_HARNESS_METRICS_HPP
#define SAMARL_HARNESS_METRICS_HPP

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "samarl/errors.hpp"

namespace samarl::harness {

struct MetricsRecord {
  int trial = 0;
  int episode = 0;
  int step = 0;
  double epsilon = 0.0;
  double agent_reward = 0.0;  // mean over agents
  double mean_loss = 0.0;     // mean over agents that trained; NaN if none did
  double objective_mbps = 0.0;
  int embb_satisfied = 0;
  int urllc_satisfied = 0;
  int exp3_arm = 0;
  int infeasible_actions = 0;

  // NaN losses compare equal to each other.
  friend bool operator==(const MetricsRecord& a, const MetricsRecord& b) {
    const bool loss_eq = (std::isnan(a.mean_loss) && std::isnan(b.mean_loss)) || a.mean_loss == b.mean_loss;
    return a.trial == b.trial && a.episode == b.episode && a.step == b.step && a.epsilon == b.epsilon &&
           a.agent_reward == b.agent_reward && loss_eq && a.objective_mbps == b.objective_mbps &&
           a.embb_satisfied == b.embb_satisfied && a.urllc_satisfied == b.urllc_satisfied &&
           a.exp3_arm == b.exp3_arm && a.infeasible_actions == b.infeasible_actions;
  }
};

inline constexpr std::array<const char*, 11> kMetricsColumns = {
    "trial",          "episode",        "step",          "epsilon",
    "agent_reward",   "mean_loss",      "objective_mbps", "embb_satisfied",
    "urllc_satisfied", "exp3_arm",      "infeasible_actions"};

inline std::string format_g9(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string metrics_header() {
  std::string h;
  for (std::size_t i = 0; i < kMetricsColumns.size(); ++i) {
    if (i) h += ',';
    h += kMetricsColumns[i];
  }
  return h;
}

inline std::string format_record(const MetricsRecord& r) {
  std::ostringstream os;
  os << r.trial << ',' << r.episode << ',' << r.step << ',' << format_g9(r.epsilon) << ','
     << format_g9(r.agent_reward) << ',' << format_g9(r.mean_loss) << ',' << format_g9(r.objective_mbps) << ','
     << r.embb_satisfied << ',' << r.urllc_satisfied << ',' << r.exp3_arm << ',' << r.infeasible_actions;
  return os.str();
}

inline void write_metrics(std::ostream& os, const std::vector<MetricsRecord>& records) {
  os << metrics_header() << '\n';
  for (const auto& r : records) os << format_record(r) << '\n';
}

inline void emit_metrics(const std::vector<MetricsRecord>& records, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError(path.string() + ": cannot open for writing");
  write_metrics(os, records);
  if (!os) throw IoError(path.string() + ": write failed");
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::vector<MetricsRecord> parse_metrics(std::istream& is, const std::string& origin = "<metrics>") {
  std::string line;
  if (!std::getline(is, line) || line != metrics_header()) throw IoError(origin + ": missing or wrong metrics header");
  std::vector<MetricsRecord> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    const auto c = split_csv_line(line);
    if (c.size() != kMetricsColumns.size())
      throw IoError(origin + ": line " + std::to_string(lineno) + " has " + std::to_string(c.size()) + " columns");
    try {
      MetricsRecord r;
      r.trial = std::stoi(c[0]);
      r.episode = std::stoi(c[1]);
      r.step = std::stoi(c[2]);
      r.epsilon = std::stod(c[3]);
      r.agent_reward = std::stod(c[4]);
      r.mean_loss = std::stod(c[5]);
      r.objective_mbps = std::stod(c[6]);
      r.embb_satisfied = std::stoi(c[7]);
      r.urllc_satisfied = std::stoi(c[8]);
      r.exp3_arm = std::stoi(c[9]);
      r.infeasible_actions = std::stoi(c[10]);
      out.push_back(r);
    } catch (const std::logic_error&) {
      throw IoError(origin + ": line " + std::to_string(lineno) + " is not a metrics record");
    }
  }
  return out;
}

inline std::vector<MetricsRecord> load_metrics(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(path.string() + ": cannot open metrics");
  return parse_metrics(is, path.string());
}

}  // namespace samarl::harness

#endif  // SAMARL_HARNESS_METRICS_HPP
