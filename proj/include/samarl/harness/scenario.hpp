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

// Everything about a trial that is fixed before learning starts: topology,
// controller arms, per-agent action tables and state normalisers, plus the
// model.json file that carries them (and the final EXP3 weights) from train
// to evaluate.

#ifndef SAMARL_HARNESS_SCENARIO_HPP
#define SAMARL_HARNESS_SCENARIO_HPP

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "samarl/errors.hpp"
#include "samarl/exp3.hpp"
#include "samarl/harness/config.hpp"
#include "samarl/netmodel.hpp"
#include "samarl/neural/agent_space.hpp"
#include "samarl/random.hpp"

namespace samarl::harness {

// Child stream names. Each is further keyed by trial (and gNodeB index for
// the per-agent ones, as trial * 1024 + b).
namespace streams {
inline constexpr const char* kTopology = "topology";
inline constexpr const char* kNormalizer = "normalizer";
inline constexpr const char* kPositions = "positions";
inline constexpr const char* kChannel = "channel";
inline constexpr const char* kExp3 = "exp3";
inline constexpr const char* kInit = "init";
inline constexpr const char* kExplore = "explore";
inline constexpr const char* kReplay = "replay";
inline constexpr const char* kEvalPositions = "eval-positions";
inline constexpr const char* kEvalChannel = "eval-channel";

inline std::uint64_t agent_key(int trial, int gnb) {
  return static_cast<std::uint64_t>(trial) * 1024u + static_cast<std::uint64_t>(gnb);
}
}  // namespace streams

struct Scenario {
  NetworkInstance net;
  ControllerActionSpace controller;
  std::vector<std::vector<int>> users;  // per gNodeB, ascending id
  std::vector<neural::AgentActionTable> tables;
  std::vector<neural::StateNormalizer> norms;

  int num_agents() const { return net.num_gnbs(); }
  int state_size(int b) const {
    return static_cast<int>(neural::encoded_state_size(users[b].size(), net.num_rbs));
  }
  std::vector<int> layer_sizes(int b, const std::vector<int>& hidden) const {
    std::vector<int> s{state_size(b)};
    s.insert(s.end(), hidden.begin(), hidden.end());
    s.push_back(static_cast<int>(tables[b].size()));
    return s;
  }
};

// Z-score statistics of every agent's log-gain block over `draws` fresh
// (positions, channel) samples.
inline std::vector<neural::StateNormalizer> fit_normalizers(const NetworkInstance& net,
                                                            const std::vector<std::vector<int>>& users,
                                                            int draws, RngStream& rng) {
  std::vector<neural::ColMatrix> samples;
  for (const auto& u : users)
    samples.emplace_back(static_cast<Eigen::Index>(u.size()) * net.num_rbs, draws);
  NetworkInstance moving = net;
  for (int d = 0; d < draws; ++d) {
    redraw_positions(moving, rng);
    const ChannelState ch = sample_channel(moving, rng);
    for (std::size_t b = 0; b < users.size(); ++b) samples[b].col(d) = neural::log_gain_block(ch, users[b]);
  }
  std::vector<neural::StateNormalizer> out;
  for (const auto& s : samples) out.push_back(neural::StateNormalizer::fit(s));
  return out;
}

// Tables and controller arms for a given network; normalisers left empty.
inline Scenario scenario_shape(const RunConfig& cfg, NetworkInstance net) {
  Scenario sc;
  sc.controller = enumerate_controller_actions(net.num_gnbs(), net.num_rbs, cfg.controller_encoding());
  for (int b = 0; b < net.num_gnbs(); ++b) {
    sc.users.push_back(net.users_of(b));
    sc.tables.push_back(neural::enumerate_structural_actions(net.num_rbs, sc.users.back(), net.k_max));
  }
  sc.net = std::move(net);
  return sc;
}

inline NetworkInstance trial_topology(const RunConfig& cfg, int trial) {
  RngStream rng = derive_stream(cfg.seed, streams::kTopology, static_cast<std::uint64_t>(trial));
  return generate_topology(cfg.scenario, rng);
}

inline Scenario build_scenario(const RunConfig& cfg, int trial) {
  Scenario sc = scenario_shape(cfg, trial_topology(cfg, trial));
  RngStream rng = derive_stream(cfg.seed, streams::kNormalizer, static_cast<std::uint64_t>(trial));
  sc.norms = fit_normalizers(sc.net, sc.users, cfg.loop.normalizer_draws, rng);
  return sc;
}

// model.json ----------------------------------------------------------------

inline nlohmann::json vector_to_json(const neural::Vector& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline neural::Vector vector_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const neural::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline nlohmann::json network_to_json(const NetworkInstance& net) {
  nlohmann::json j;
  j["num_rbs"] = net.num_rbs;
  j["k_max"] = net.k_max;
  j["phys"] = {{"rb_bandwidth_hz", net.phys.rb_bandwidth_hz},
               {"tx_power_dbm", net.phys.tx_power_dbm},
               {"noise_power_dbm", net.phys.noise_power_dbm},
               {"area_side_m", net.phys.area_side_m},
               {"path_loss_exponent", net.phys.path_loss_exponent},
               {"reference_distance_m", net.phys.reference_distance_m}};
  j["qos"] = {{"r_min_bps", net.qos.r_min_bps}, {"d_max_s", net.qos.d_max_s}};
  for (const auto& g : net.gnbs) j["gnbs"].push_back({{"id", g.id}, {"x", g.position.x}, {"y", g.position.y}});
  for (const auto& u : net.users)
    j["users"].push_back({{"id", u.id},
                          {"slice", to_string(u.slice)},
                          {"x", u.position.x},
                          {"y", u.position.y},
                          {"packet_len_bits", u.packet_len_bits},
                          {"arrival_rate_pps", u.arrival_rate_pps},
                          {"home_gnb", u.home_gnb}});
  return j;
}

inline NetworkInstance network_from_json(const nlohmann::json& j) {
  NetworkInstance net;
  net.num_rbs = j.at("num_rbs").get<int>();
  net.k_max = j.at("k_max").get<int>();
  const auto& p = j.at("phys");
  net.phys.rb_bandwidth_hz = p.at("rb_bandwidth_hz").get<double>();
  net.phys.tx_power_dbm = p.at("tx_power_dbm").get<double>();
  net.phys.noise_power_dbm = p.at("noise_power_dbm").get<double>();
  net.phys.area_side_m = p.at("area_side_m").get<double>();
  net.phys.path_loss_exponent = p.at("path_loss_exponent").get<double>();
  net.phys.reference_distance_m = p.at("reference_distance_m").get<double>();
  net.qos.r_min_bps = j.at("qos").at("r_min_bps").get<double>();
  net.qos.d_max_s = j.at("qos").at("d_max_s").get<double>();
  for (const auto& g : j.at("gnbs"))
    net.gnbs.push_back({g.at("id").get<int>(), {g.at("x").get<double>(), g.at("y").get<double>()}});
  if (j.contains("users")) {
    for (const auto& u : j.at("users")) {
      EndUser e;
      e.id = u.at("id").get<int>();
      const auto slice = u.at("slice").get<std::string>();
      if (slice != "embb" && slice != "urllc") throw IoError("model file: bad slice '" + slice + "'");
      e.slice = slice == "embb" ? SliceKind::Embb : SliceKind::Urllc;
      e.position = {u.at("x").get<double>(), u.at("y").get<double>()};
      e.packet_len_bits = u.at("packet_len_bits").get<double>();
      e.arrival_rate_pps = u.at("arrival_rate_pps").get<double>();
      e.home_gnb = u.at("home_gnb").get<int>();
      net.users.push_back(e);
    }
  }
  net.validate();
  return net;
}

struct ModelFile {
  NetworkInstance net;
  std::vector<neural::StateNormalizer> norms;
  std::vector<double> exp3_weights;
  std::string encoding;  // "full" | "coarse"
};

inline void save_model_file(const std::filesystem::path& path, const Scenario& sc,
                            const std::vector<double>& exp3_weights) {
  nlohmann::json j;
  j["format"] = "samarl-model";
  j["version"] = 1;
  j["network"] = network_to_json(sc.net);
  j["encoding"] = sc.controller.encoding == ActionEncoding::Full ? "full" : "coarse";
  j["exp3_weights"] = exp3_weights;
  for (const auto& n : sc.norms) j["normalizers"].push_back({{"mean", vector_to_json(n.mean)}, {"stddev", vector_to_json(n.stddev)}});
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError(path.string() + ": cannot open for writing");
  os << j.dump(1) << '\n';
  if (!os) throw IoError(path.string() + ": write failed");
}

inline ModelFile load_model_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(path.string() + ": cannot open model file");
  try {
    const auto j = nlohmann::json::parse(is);
    if (j.value("format", "") != "samarl-model") throw IoError(path.string() + ": not a model file");
    ModelFile m;
    m.net = network_from_json(j.at("network"));
    m.encoding = j.at("encoding").get<std::string>();
    m.exp3_weights = j.at("exp3_weights").get<std::vector<double>>();
    for (const auto& n : j.at("normalizers"))
      m.norms.push_back({vector_from_json(n.at("mean")), vector_from_json(n.at("stddev"))});
    if (static_cast<int>(m.norms.size()) != m.net.num_gnbs())
      throw IoError(path.string() + ": normaliser count does not match gNodeB count");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

// The trained scenario must have the shape the config describes.
inline void check_model_shape(const ModelFile& m, const RunConfig& cfg, const std::filesystem::path& path) {
  const auto& s = cfg.scenario;
  int embb = 0, urllc = 0;
  for (const auto& u : m.net.users) (u.slice == SliceKind::Embb ? embb : urllc) += 1;
  if (m.net.num_gnbs() != s.num_gnbs || m.net.num_rbs != s.num_rbs || m.net.k_max != s.k_max ||
      embb != s.num_embb || urllc != s.num_urllc)
    throw ShapeError(path.string() + ": trained scenario shape (B=" + std::to_string(m.net.num_gnbs()) +
                     ", K=" + std::to_string(m.net.num_rbs) + ", K_max=" + std::to_string(m.net.k_max) +
                     ", eMBB=" + std::to_string(embb) + ", URLLC=" + std::to_string(urllc) +
                     ") does not match the config");
}

}  // namespace samarl::harness

#endif  // SAMARL_HARNESS_SCENARIO_HPP
