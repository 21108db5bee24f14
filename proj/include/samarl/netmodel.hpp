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

// Network model: topology, channel gains and the per-user rate and delay
// formulas of a single-numerology OFDMA downlink.

#ifndef SAMARL_NETMODEL_HPP
#define SAMARL_NETMODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "samarl/errors.hpp"
#include "samarl/random.hpp"

namespace samarl {

enum class SliceKind : std::uint8_t { Embb = 0, Urllc = 1 };

inline const char* to_string(SliceKind s) {
  return s == SliceKind::Embb ? "embb" : "urllc";
}

inline double dbm_to_watts(double dbm) {
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

struct PhysConfig {
  double rb_bandwidth_hz = 180e3;
  double tx_power_dbm = 30.0;
  double noise_power_dbm = -114.0;
  double area_side_m = 1000.0;
  double path_loss_exponent = 3.5;
  double reference_distance_m = 1.0;

  double tx_power_w() const { return dbm_to_watts(tx_power_dbm); }
  double noise_power_w() const { return dbm_to_watts(noise_power_dbm); }

  void validate() const {
    if (!(rb_bandwidth_hz > 0.0)) throw ConfigError("rb_bandwidth_hz must be > 0");
    if (!(noise_power_w() > 0.0)) throw ConfigError("noise power must be > 0 W");
    if (!(area_side_m > 0.0)) throw ConfigError("area_side_m must be > 0");
    if (!(reference_distance_m > 0.0))
      throw ConfigError("reference_distance_m must be > 0");
  }
};

struct QosThresholds {
  double r_min_bps = 100e3;
  double d_max_s = 10e-3;
};

struct Position {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Gnb {
  int id = 0;
  Position position;
};

struct EndUser {
  int id = 0;
  SliceKind slice = SliceKind::Embb;
  Position position;
  double packet_len_bits = 400.0;
  double arrival_rate_pps = 100.0;
  int home_gnb = 0;
};

struct NetworkInstance {
  std::vector<Gnb> gnbs;
  std::vector<EndUser> users;
  int num_rbs = 0;
  PhysConfig phys;
  QosThresholds qos;
  int k_max = 1;

  int num_gnbs() const { return static_cast<int>(gnbs.size()); }
  int num_users() const { return static_cast<int>(users.size()); }

  // Users served by `gnb`, ascending id.
  std::vector<int> users_of(int gnb) const {
    std::vector<int> out;
    for (const auto& u : users)
      if (u.home_gnb == gnb) out.push_back(u.id);
    return out;
  }

  void validate() const {
    if (gnbs.empty()) throw ConfigError("network has no gNodeBs");
    if (num_rbs < 1) throw ConfigError("network has no resource blocks");
    if (k_max < 1) throw ConfigError("k_max must be >= 1");
    if (!(qos.r_min_bps > 0.0)) throw ConfigError("r_min_bps must be > 0");
    if (!(qos.d_max_s > 0.0)) throw ConfigError("d_max_s must be > 0");
    phys.validate();
    for (std::size_t i = 0; i < users.size(); ++i) {
      const auto& u = users[i];
      if (u.id != static_cast<int>(i)) throw ConfigError("user ids must be 0..U-1");
      if (u.home_gnb < 0 || u.home_gnb >= num_gnbs())
        throw ConfigError("user " + std::to_string(u.id) + " has invalid home gNodeB");
      if (!(u.arrival_rate_pps > 0.0)) throw ConfigError("arrival rate must be > 0");
      if (!(u.packet_len_bits > 0.0)) throw ConfigError("packet length must be > 0");
    }
  }
};

struct ScenarioConfig {
  int num_gnbs = 2;
  int num_embb = 4;
  int num_urllc = 4;
  int num_rbs = 6;
  int k_max = 3;
  PhysConfig phys;
  QosThresholds qos;
  double embb_packet_bits = 400.0;
  double urllc_packet_bits = 120.0;
  double arrival_rate_pps = 100.0;
};

// gNodeBs sit at the centres of a near-square grid of cells.
inline std::vector<Gnb> place_gnbs(int count, double side) {
  std::vector<Gnb> out;
  if (count <= 0) return out;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  const int rows = (count + cols - 1) / cols;
  for (int i = 0; i < count; ++i) {
    const int r = i / cols;
    const int c = i % cols;
    const int in_row = (r == rows - 1) ? count - r * cols : cols;
    out.push_back(Gnb{i, {side * (c + 0.5) / in_row, side * (r + 0.5) / rows}});
  }
  return out;
}

inline int nearest_gnb(const std::vector<Gnb>& gnbs, Position p) {
  int best = 0;
  double best_d = distance(gnbs[0].position, p);
  for (std::size_t i = 1; i < gnbs.size(); ++i) {
    const double d = distance(gnbs[i].position, p);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

inline NetworkInstance generate_topology(const ScenarioConfig& cfg, RngStream& rng) {
  if (cfg.num_gnbs < 1) throw ConfigError("scenario needs at least one gNodeB");
  if (cfg.num_rbs < 1) throw ConfigError("scenario needs at least one resource block");
  if (cfg.num_embb < 0 || cfg.num_urllc < 0) throw ConfigError("negative user count");

  NetworkInstance net;
  net.phys = cfg.phys;
  net.qos = cfg.qos;
  net.num_rbs = cfg.num_rbs;
  net.k_max = cfg.k_max;
  net.gnbs = place_gnbs(cfg.num_gnbs, cfg.phys.area_side_m);

  const int total = cfg.num_embb + cfg.num_urllc;
  for (int i = 0; i < total; ++i) {
    EndUser u;
    u.id = i;
    u.slice = i < cfg.num_embb ? SliceKind::Embb : SliceKind::Urllc;
    u.packet_len_bits = u.slice == SliceKind::Embb ? cfg.embb_packet_bits : cfg.urllc_packet_bits;
    u.arrival_rate_pps = cfg.arrival_rate_pps;
    u.position.x = rng.uniform(0.0, cfg.phys.area_side_m);
    u.position.y = rng.uniform(0.0, cfg.phys.area_side_m);
    u.home_gnb = nearest_gnb(net.gnbs, u.position);
    net.users.push_back(u);
  }
  net.validate();
  return net;
}

inline NetworkInstance generate_topology(const ScenarioConfig& cfg, std::uint64_t seed) {
  RngStream rng(seed);
  return generate_topology(cfg, rng);
}

// Moves every user to a fresh uniform position inside its home gNodeB's
// cell, so the user-to-gNodeB association (and hence every agent's shape)
// is preserved.
inline void redraw_positions(NetworkInstance& net, RngStream& rng) {
  const double side = net.phys.area_side_m;
  for (auto& u : net.users) {
    for (int attempt = 0;; ++attempt) {
      Position p{rng.uniform(0.0, side), rng.uniform(0.0, side)};
      if (nearest_gnb(net.gnbs, p) == u.home_gnb) {
        u.position = p;
        break;
      }
      if (attempt > 100000) throw Error("could not place user inside its cell");
    }
  }
}

// Linear power gains of every user against its home gNodeB, U x K.
struct ChannelState {
  int users = 0;
  int rbs = 0;
  std::vector<double> gains;

  ChannelState() = default;
  ChannelState(int u, int k) : users(u), rbs(k), gains(static_cast<std::size_t>(u) * k, 0.0) {}

  double& at(int u, int k) { return gains[static_cast<std::size_t>(u) * rbs + k]; }
  double at(int u, int k) const { return gains[static_cast<std::size_t>(u) * rbs + k]; }
  std::span<const double> row(int u) const {
    return {gains.data() + static_cast<std::size_t>(u) * rbs, static_cast<std::size_t>(rbs)};
  }
};

inline double path_loss(double d, const PhysConfig& phys) {
  d = std::max(d, phys.reference_distance_m);
  return std::pow(d / phys.reference_distance_m, -phys.path_loss_exponent);
}

inline ChannelState sample_channel(const NetworkInstance& net, RngStream& rng) {
  ChannelState ch(net.num_users(), net.num_rbs);
  for (const auto& u : net.users) {
    const double pl = path_loss(distance(u.position, net.gnbs[u.home_gnb].position), net.phys);
    for (int k = 0; k < net.num_rbs; ++k) ch.at(u.id, k) = pl * rng.exponential();
  }
  return ch;
}

inline double snr(double gain, const PhysConfig& phys) {
  return phys.tx_power_w() * gain / phys.noise_power_w();
}

inline double link_rate(double gain, const PhysConfig& phys) {
  return phys.rb_bandwidth_hz * std::log2(1.0 + snr(gain, phys));
}

// Binary user-by-RB assignment matrix (x_u^k).
struct RbMatrix {
  int users = 0;
  int rbs = 0;
  std::vector<std::uint8_t> bits;

  RbMatrix() = default;
  RbMatrix(int u, int k) : users(u), rbs(k), bits(static_cast<std::size_t>(u) * k, 0) {}

  std::uint8_t& at(int u, int k) { return bits[static_cast<std::size_t>(u) * rbs + k]; }
  std::uint8_t at(int u, int k) const { return bits[static_cast<std::size_t>(u) * rbs + k]; }

  int row_count(int u) const {
    int n = 0;
    for (int k = 0; k < rbs; ++k) n += at(u, k);
    return n;
  }

  friend bool operator==(const RbMatrix&, const RbMatrix&) = default;
};

// Borrowed RBs are served by the home gNodeB, so the home gain applies on
// every assigned RB whoever owns it.
inline double user_total_rate(const RbMatrix& x, const ChannelState& ch, int user,
                              const PhysConfig& phys) {
  double r = 0.0;
  for (int k = 0; k < x.rbs; ++k)
    if (x.at(user, k)) r += link_rate(ch.at(user, k), phys);
  return r;
}

// M/M/1 sojourn time with service rate rate/L packets per second.
// nullopt when the queue is unstable (mu <= lambda).
inline std::optional<double> packet_delay(double rate_bps, double packet_len_bits,
                                          double arrival_pps) {
  const double mu = rate_bps / packet_len_bits;
  if (!(mu > arrival_pps)) return std::nullopt;
  return 1.0 / (mu - arrival_pps);
}

}  // namespace samarl

#endif  // SAMARL_NETMODEL_HPP
