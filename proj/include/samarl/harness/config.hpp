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

// Run configuration. The file format is INI with three sections:
//
//   [scenario]  gnbs embb_users urllc_users rbs k_max area_side_m
//               rb_bandwidth_hz tx_power_dbm noise_power_dbm
//               path_loss_exponent embb_packet_bits urllc_packet_bits
//               arrival_rate_pps r_min_bps d_max_s
//   [hyper]     learning_rate gamma epsilon_start epsilon_min epsilon_decay
//               replay_capacity batch_size target_update_interval hidden
//   [loop]      seed policy episodes steps_per_episode reposition_every
//               trials exp3_alpha exp3_mode checkpoint_every eval_trials
//               normalizer_draws
//
// Every key is optional; unknown keys are rejected. The same
// "section.key" names drive sweep overrides, plus the pseudo-key "users"
// (total user count, split evenly with eMBB taking the odd one).

#ifndef SAMARL_HARNESS_CONFIG_HPP
#define SAMARL_HARNESS_CONFIG_HPP

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "samarl/errors.hpp"
#include "samarl/exp3.hpp"
#include "samarl/netmodel.hpp"
#include "samarl/neural/ddqn.hpp"

namespace samarl::harness {

enum class Policy { SamaRl, OneSra, Oracle };

inline Policy parse_policy(const std::string& s) {
  if (s == "sama-rl" || s == "samarl") return Policy::SamaRl;
  if (s == "1sra" || s == "one-sra") return Policy::OneSra;
  if (s == "oracle") return Policy::Oracle;
  throw ConfigError("unknown policy '" + s + "' (expected sama-rl, 1sra or oracle)");
}

inline const char* to_string(Policy p) {
  switch (p) {
    case Policy::SamaRl: return "sama-rl";
    case Policy::OneSra: return "1sra";
    case Policy::Oracle: return "oracle";
  }
  return "?";
}

struct LoopConfig {
  int episodes = 3000;
  int steps_per_episode = 10;
  int reposition_every = 10;
  int trials = 1;
  double exp3_alpha = 0.1;
  std::string exp3_mode = "auto";  // auto | full | coarse
  int checkpoint_every = 500;
  int eval_trials = 20;
  int normalizer_draws = 1000;
};

struct RunConfig {
  ScenarioConfig scenario;
  neural::DdqnConfig hyper;
  LoopConfig loop;
  std::uint64_t seed = 1;
  Policy policy = Policy::SamaRl;

  ActionEncoding controller_encoding() const {
    if (loop.exp3_mode == "full") return ActionEncoding::Full;
    if (loop.exp3_mode == "coarse") return ActionEncoding::Coarse;
    return auto_encoding(scenario.num_gnbs, scenario.num_rbs);
  }

  void validate() const {
    const auto& s = scenario;
    if (s.num_gnbs < 1) throw ConfigError("scenario.gnbs must be >= 1");
    if (s.num_rbs < 1) throw ConfigError("scenario.rbs must be >= 1");
    if (s.num_embb < 0 || s.num_urllc < 0) throw ConfigError("user counts must be >= 0");
    if (s.k_max < 1) throw ConfigError("scenario.k_max must be >= 1");
    if (!(s.qos.r_min_bps > 0.0)) throw ConfigError("scenario.r_min_bps must be > 0");
    if (!(s.qos.d_max_s > 0.0)) throw ConfigError("scenario.d_max_s must be > 0");
    if (!(s.arrival_rate_pps > 0.0)) throw ConfigError("scenario.arrival_rate_pps must be > 0");
    s.phys.validate();
    if (loop.episodes < 1 || loop.steps_per_episode < 1 || loop.trials < 1 ||
        loop.reposition_every < 1 || loop.eval_trials < 1 || loop.normalizer_draws < 1 ||
        loop.checkpoint_every < 0)
      throw ConfigError("loop counts must be positive");
    if (!(loop.exp3_alpha >= 0.0 && loop.exp3_alpha <= 1.0)) throw ConfigError("loop.exp3_alpha must lie in [0, 1]");
    if (loop.exp3_mode != "auto" && loop.exp3_mode != "full" && loop.exp3_mode != "coarse")
      throw ConfigError("loop.exp3_mode must be auto, full or coarse");
    if (hyper.batch_size < 1 || hyper.replay_capacity < hyper.batch_size)
      throw ConfigError("need 1 <= batch_size <= replay_capacity");
    if (hyper.target_update_interval < 1) throw ConfigError("hyper.target_update_interval must be >= 1");
    if (!(hyper.learning_rate > 0.0)) throw ConfigError("hyper.learning_rate must be > 0");
    if (!(hyper.gamma >= 0.0 && hyper.gamma <= 1.0)) throw ConfigError("hyper.gamma must lie in [0, 1]");
    if (!(hyper.epsilon_decay > 0.0 && hyper.epsilon_decay <= 1.0))
      throw ConfigError("hyper.epsilon_decay must lie in (0, 1]");
    if (!(hyper.epsilon_min >= 0.0 && hyper.epsilon_min <= hyper.epsilon_start && hyper.epsilon_start <= 1.0))
      throw ConfigError("need 0 <= epsilon_min <= epsilon_start <= 1");
    for (int h : hyper.hidden)
      if (h < 1) throw ConfigError("hidden widths must be >= 1");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(v.substr(used)).size() != 0) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  Int x{};
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc{} || p != t.data() + t.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return x;
}

inline std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_int<int>(key, item));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
  return out;
}

}  // namespace detail

// Sets one "section.key" value (or the pseudo-key "users").
inline void apply_override(RunConfig& cfg, const std::string& key, const std::string& raw) {
  using detail::to_double;
  using detail::to_int;
  const std::string v = detail::trim(raw);
  auto& s = cfg.scenario;
  auto& h = cfg.hyper;
  auto& l = cfg.loop;
  if (key == "users") {
    const int total = to_int<int>(key, v);
    if (total < 0) throw ConfigError("users must be >= 0");
    s.num_embb = total - total / 2;
    s.num_urllc = total / 2;
  } else if (key == "scenario.gnbs") s.num_gnbs = to_int<int>(key, v);
  else if (key == "scenario.embb_users") s.num_embb = to_int<int>(key, v);
  else if (key == "scenario.urllc_users") s.num_urllc = to_int<int>(key, v);
  else if (key == "scenario.rbs") s.num_rbs = to_int<int>(key, v);
  else if (key == "scenario.k_max") s.k_max = to_int<int>(key, v);
  else if (key == "scenario.area_side_m") s.phys.area_side_m = to_double(key, v);
  else if (key == "scenario.rb_bandwidth_hz") s.phys.rb_bandwidth_hz = to_double(key, v);
  else if (key == "scenario.tx_power_dbm") s.phys.tx_power_dbm = to_double(key, v);
  else if (key == "scenario.noise_power_dbm") s.phys.noise_power_dbm = to_double(key, v);
  else if (key == "scenario.path_loss_exponent") s.phys.path_loss_exponent = to_double(key, v);
  else if (key == "scenario.embb_packet_bits") s.embb_packet_bits = to_double(key, v);
  else if (key == "scenario.urllc_packet_bits") s.urllc_packet_bits = to_double(key, v);
  else if (key == "scenario.arrival_rate_pps") s.arrival_rate_pps = to_double(key, v);
  else if (key == "scenario.r_min_bps") s.qos.r_min_bps = to_double(key, v);
  else if (key == "scenario.d_max_s") s.qos.d_max_s = to_double(key, v);
  else if (key == "hyper.learning_rate") h.learning_rate = to_double(key, v);
  else if (key == "hyper.gamma") h.gamma = to_double(key, v);
  else if (key == "hyper.epsilon_start") h.epsilon_start = to_double(key, v);
  else if (key == "hyper.epsilon_min") h.epsilon_min = to_double(key, v);
  else if (key == "hyper.epsilon_decay") h.epsilon_decay = to_double(key, v);
  else if (key == "hyper.replay_capacity") h.replay_capacity = to_int<std::size_t>(key, v);
  else if (key == "hyper.batch_size") h.batch_size = to_int<std::size_t>(key, v);
  else if (key == "hyper.target_update_interval") h.target_update_interval = to_int<std::uint64_t>(key, v);
  else if (key == "hyper.hidden") h.hidden = detail::to_int_list(key, v);
  else if (key == "loop.seed") cfg.seed = to_int<std::uint64_t>(key, v);
  else if (key == "loop.policy") cfg.policy = parse_policy(v);
  else if (key == "loop.episodes") l.episodes = to_int<int>(key, v);
  else if (key == "loop.steps_per_episode") l.steps_per_episode = to_int<int>(key, v);
  else if (key == "loop.reposition_every") l.reposition_every = to_int<int>(key, v);
  else if (key == "loop.trials") l.trials = to_int<int>(key, v);
  else if (key == "loop.exp3_alpha") l.exp3_alpha = to_double(key, v);
  else if (key == "loop.exp3_mode") l.exp3_mode = v;
  else if (key == "loop.checkpoint_every") l.checkpoint_every = to_int<int>(key, v);
  else if (key == "loop.eval_trials") l.eval_trials = to_int<int>(key, v);
  else if (key == "loop.normalizer_draws") l.normalizer_draws = to_int<int>(key, v);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

inline RunConfig parse_config(std::istream& is, const std::string& origin = "<config>") {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (section != "scenario" && section != "hyper" && section != "loop")
      throw ConfigError(origin + ": unknown section or top-level key '" + section + "'");
    for (const auto& [key, value] : body) apply_override(cfg, section + "." + key, value.data());
  }
  cfg.validate();
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError(path.string() + ": cannot open config");
  return parse_config(is, path.string());
}

}  // namespace samarl::harness

#endif  // SAMARL_HARNESS_CONFIG_HPP
