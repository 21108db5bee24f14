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

// Data model of the two-level RB allocation and its constraint checks.

#ifndef SAMARL_ALLOCATION_HPP
#define SAMARL_ALLOCATION_HPP

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "samarl/errors.hpp"
#include "samarl/netmodel.hpp"

namespace samarl {

// owner[k] is the gNodeB holding RB k; this defines the partition K_b.
struct ControllerAssignment {
  std::vector<int> owner;

  int num_rbs() const { return static_cast<int>(owner.size()); }
  bool owns(int gnb, int rb) const { return owner[rb] == gnb; }

  std::vector<int> owned_by(int gnb) const {
    std::vector<int> out;
    for (int k = 0; k < num_rbs(); ++k)
      if (owner[k] == gnb) out.push_back(k);
    return out;
  }

  // Bit k set iff gnb owns RB k.
  std::uint64_t owned_mask(int gnb) const {
    std::uint64_t m = 0;
    for (int k = 0; k < num_rbs(); ++k)
      if (owner[k] == gnb) m |= std::uint64_t{1} << k;
    return m;
  }

  friend bool operator==(const ControllerAssignment&, const ControllerAssignment&) = default;
};

// All B^K partitions in lexicographic order (RB 0 most significant).
inline std::vector<ControllerAssignment> all_partitions(int num_gnbs, int num_rbs) {
  std::vector<ControllerAssignment> out;
  ControllerAssignment a{std::vector<int>(num_rbs, 0)};
  for (;;) {
    out.push_back(a);
    int k = num_rbs - 1;
    while (k >= 0 && a.owner[k] == num_gnbs - 1) {
      a.owner[k] = 0;
      --k;
    }
    if (k < 0) break;
    ++a.owner[k];
  }
  return out;
}

struct Allocation {
  RbMatrix x;
  ControllerAssignment assignment;

  Allocation() = default;
  Allocation(int users, int rbs, ControllerAssignment a) : x(users, rbs), assignment(std::move(a)) {}
  Allocation(RbMatrix m, ControllerAssignment a) : x(std::move(m)), assignment(std::move(a)) {}

  static Allocation empty(const NetworkInstance& net, ControllerAssignment a) {
    return Allocation(net.num_users(), net.num_rbs, std::move(a));
  }
};

inline void check_shape(const Allocation& alloc, const NetworkInstance& net) {
  if (alloc.x.users != net.num_users() || alloc.x.rbs != net.num_rbs ||
      alloc.assignment.num_rbs() != net.num_rbs)
    throw ShapeError("allocation does not match network dimensions");
}

// Per-user cap: RB count, counted over all RBs including borrowed ones.
inline bool check_fairness(const Allocation& alloc, int k_max) {
  for (int u = 0; u < alloc.x.users; ++u)
    if (alloc.x.row_count(u) > k_max) return false;
  return true;
}

// OFDMA exclusivity, global: every RB carries at most one user network-wide.
inline bool check_ofdma(const Allocation& alloc) {
  for (int k = 0; k < alloc.x.rbs; ++k) {
    int col = 0;
    for (int u = 0; u < alloc.x.users; ++u) col += alloc.x.at(u, k);
    if (col > 1) return false;
  }
  return true;
}

// Borrowing rule for one gNodeB: holding any out-of-partition RB requires
// the own users' owned-RB holdings to sum to at least |K_b| (with exclusive
// use, every owned RB taken).
inline bool check_borrowing_of(const Allocation& alloc, const NetworkInstance& net, int gnb) {
  const auto& a = alloc.assignment;
  int owned = 0;
  int owned_used = 0;
  bool borrows = false;
  for (int k = 0; k < alloc.x.rbs; ++k) {
    if (a.owns(gnb, k)) ++owned;
    for (const auto& u : net.users) {
      if (u.home_gnb != gnb || !alloc.x.at(u.id, k)) continue;
      if (a.owns(gnb, k))
        ++owned_used;
      else
        borrows = true;
    }
  }
  return !borrows || owned_used >= owned;
}

inline bool check_borrowing(const Allocation& alloc, const NetworkInstance& net) {
  for (int b = 0; b < net.num_gnbs(); ++b)
    if (!check_borrowing_of(alloc, net, b)) return false;
  return true;
}

struct QosReport {
  bool ok = true;
  std::vector<double> rates_bps;
  // nullopt marks an unstable queue.
  std::vector<std::optional<double>> delays_s;
  std::vector<bool> satisfied;
};

inline bool user_qos_satisfied(const EndUser& u, double rate, const std::optional<double>& delay,
                               const QosThresholds& qos) {
  if (u.slice == SliceKind::Embb) return rate >= qos.r_min_bps;
  return delay.has_value() && *delay <= qos.d_max_s;
}

inline QosReport check_qos(const Allocation& alloc, const ChannelState& ch,
                           const NetworkInstance& net) {
  QosReport rep;
  rep.rates_bps.resize(net.users.size());
  rep.delays_s.resize(net.users.size());
  rep.satisfied.resize(net.users.size());
  for (const auto& u : net.users) {
    const double r = user_total_rate(alloc.x, ch, u.id, net.phys);
    const auto d = packet_delay(r, u.packet_len_bits, u.arrival_rate_pps);
    rep.rates_bps[u.id] = r;
    rep.delays_s[u.id] = d;
    rep.satisfied[u.id] = user_qos_satisfied(u, r, d, net.qos);
    rep.ok = rep.ok && rep.satisfied[u.id];
  }
  return rep;
}

inline double user_total_rate(const Allocation& alloc, const ChannelState& ch, int user,
                              const PhysConfig& phys) {
  return user_total_rate(alloc.x, ch, user, phys);
}

// Sum rate over all users, in bps.
inline double objective(const Allocation& alloc, const ChannelState& ch,
                        const NetworkInstance& net) {
  double total = 0.0;
  for (const auto& u : net.users) total += user_total_rate(alloc.x, ch, u.id, net.phys);
  return total;
}

enum class Constraint { Fairness, Ofdma, Borrowing, Rate, Delay };

inline const char* to_string(Constraint c) {
  switch (c) {
    case Constraint::Fairness: return "fairness";
    case Constraint::Ofdma: return "ofdma";
    case Constraint::Borrowing: return "borrowing";
    case Constraint::Rate: return "rate";
    case Constraint::Delay: return "delay";
  }
  return "?";
}

// Which constraint failed, and on which user / RB / gNodeB (-1 if n/a).
struct Witness {
  Constraint constraint;
  int user = -1;
  int rb = -1;
  int gnb = -1;
};

struct FeasibilityReport {
  bool fairness = true;
  bool ofdma = true;
  bool borrowing = true;
  bool rate = true;
  bool delay = true;
  std::vector<Witness> witnesses;

  bool structural() const { return fairness && ofdma && borrowing; }
  bool feasible() const { return structural() && rate && delay; }
};

inline FeasibilityReport is_feasible(const Allocation& alloc, const ChannelState& ch,
                                     const NetworkInstance& net) {
  check_shape(alloc, net);
  FeasibilityReport rep;
  for (int u = 0; u < alloc.x.users; ++u) {
    if (alloc.x.row_count(u) > net.k_max) {
      rep.fairness = false;
      rep.witnesses.push_back({Constraint::Fairness, u, -1, -1});
    }
  }
  for (int k = 0; k < alloc.x.rbs; ++k) {
    int col = 0;
    for (int u = 0; u < alloc.x.users; ++u) col += alloc.x.at(u, k);
    if (col > 1) {
      rep.ofdma = false;
      rep.witnesses.push_back({Constraint::Ofdma, -1, k, -1});
    }
  }
  for (int b = 0; b < net.num_gnbs(); ++b) {
    if (!check_borrowing_of(alloc, net, b)) {
      rep.borrowing = false;
      rep.witnesses.push_back({Constraint::Borrowing, -1, -1, b});
    }
  }
  const auto qos = check_qos(alloc, ch, net);
  for (const auto& u : net.users) {
    if (qos.satisfied[u.id]) continue;
    if (u.slice == SliceKind::Embb) {
      rep.rate = false;
      rep.witnesses.push_back({Constraint::Rate, u.id, -1, u.home_gnb});
    } else {
      rep.delay = false;
      rep.witnesses.push_back({Constraint::Delay, u.id, -1, u.home_gnb});
    }
  }
  return rep;
}

// Line-oriented text form: one "user rb" pair per assigned entry, in
// row-major order. Lines starting with '#' are comments.
inline std::string to_text(const RbMatrix& x) {
  std::ostringstream os;
  for (int u = 0; u < x.users; ++u)
    for (int k = 0; k < x.rbs; ++k)
      if (x.at(u, k)) os << u << ' ' << k << '\n';
  return os.str();
}

inline RbMatrix parse_rb_matrix(const std::string& text, int users, int rbs) {
  RbMatrix x(users, rbs);
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    int u = -1, k = -1;
    std::string rest;
    if (!(ls >> u >> k) || (ls >> rest))
      throw Error("allocation text line " + std::to_string(lineno) + ": expected 'user rb'");
    if (u < 0 || u >= users || k < 0 || k >= rbs)
      throw ShapeError("allocation text line " + std::to_string(lineno) + ": index out of range");
    x.at(u, k) = 1;
  }
  return x;
}

}  // namespace samarl

#endif  // SAMARL_ALLOCATION_HPP
