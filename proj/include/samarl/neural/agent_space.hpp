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

// Per-gNodeB action tables and state encoding.

#ifndef SAMARL_NEURAL_AGENT_SPACE_HPP
#define SAMARL_NEURAL_AGENT_SPACE_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "samarl/allocation.hpp"
#include "samarl/errors.hpp"
#include "samarl/netmodel.hpp"
#include "samarl/neural/mlp.hpp"

namespace samarl::neural {

inline constexpr std::size_t kMaxAgentActions = 65536;

// Row i maps each RB to a local user index in [0, |U_b|) or -1 (unused).
class AgentActionTable {
 public:
  AgentActionTable() = default;
  AgentActionTable(int num_rbs, std::vector<int> users) : num_rbs_(num_rbs), users_(std::move(users)) {}

  int num_rbs() const { return num_rbs_; }
  const std::vector<int>& users() const { return users_; }
  std::size_t size() const { return num_rbs_ == 0 ? 0 : cells_.size() / num_rbs_; }

  std::span<const std::int8_t> row(std::size_t i) const {
    return {cells_.data() + i * num_rbs_, static_cast<std::size_t>(num_rbs_)};
  }

  void append(std::span<const std::int8_t> r) { cells_.insert(cells_.end(), r.begin(), r.end()); }

  // Global user id holding RB k in row i, or -1.
  int holder(std::size_t i, int k) const {
    const int local = row(i)[k];
    return local < 0 ? -1 : users_[local];
  }

 private:
  int num_rbs_ = 0;
  std::vector<int> users_;
  std::vector<std::int8_t> cells_;
};

// Borrowing rule for a single row: out-of-partition RBs only when all owned RBs are used.
inline bool row_respects_borrowing(std::span<const std::int8_t> row, std::uint64_t owned_mask) {
  int owned = 0, used = 0;
  bool borrows = false;
  for (std::size_t k = 0; k < row.size(); ++k) {
    const bool mine = (owned_mask >> k) & 1U;
    owned += mine;
    if (row[k] < 0) continue;
    if (mine)
      ++used;
    else
      borrows = true;
  }
  return !borrows || used == owned;
}

// All rows over K RBs for the given users satisfying the per-user cap,
// single user per RB, and the borrowing gate for the owned set. Rows are in
// lexicographic order of the per-RB holder (RB 0 most significant,
// unused < user 0 < user 1 ...), so row 0 is the all-zero action.
inline AgentActionTable enumerate_agent_actions(int num_rbs, const std::vector<int>& users,
                                                std::uint64_t owned_mask, int k_max,
                                                std::size_t limit = kMaxAgentActions) {
  if (num_rbs < 1 || num_rbs > 63) throw ShapeError("agent action table needs 1 <= K <= 63");
  if (users.size() > 127) throw ShapeError("too many users for one agent");
  AgentActionTable table(num_rbs, users);
  const int nu = static_cast<int>(users.size());
  std::vector<std::int8_t> row(num_rbs, -1);
  std::vector<int> count(nu, 0);
  std::size_t accepted = 0;
  for (;;) {
    std::fill(count.begin(), count.end(), 0);
    bool ok = true;
    for (int k = 0; k < num_rbs && ok; ++k)
      if (row[k] >= 0 && ++count[row[k]] > k_max) ok = false;
    if (ok && row_respects_borrowing(row, owned_mask)) {
      if (++accepted > limit)
        throw SizeError("agent action table exceeds " + std::to_string(limit) +
                        " rows; reduce K or K_max");
      table.append(row);
    }
    int k = num_rbs - 1;
    while (k >= 0 && row[k] == nu - 1) {
      row[k] = -1;
      --k;
    }
    if (k < 0) break;
    ++row[k];
  }
  return table;
}

// Structural table valid under any partition (no borrowing gate); a
// partition then selects its legal rows through legal_rows().
inline AgentActionTable enumerate_structural_actions(int num_rbs, const std::vector<int>& users,
                                                     int k_max) {
  const std::uint64_t all = num_rbs >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << num_rbs) - 1);
  return enumerate_agent_actions(num_rbs, users, all, k_max);
}

using ActionMask = std::vector<std::uint8_t>;

inline ActionMask legal_rows(const AgentActionTable& table, std::uint64_t owned_mask) {
  ActionMask m(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) m[i] = row_respects_borrowing(table.row(i), owned_mask);
  return m;
}

// Places one row into an allocation matrix (other users untouched).
inline void apply_row(const AgentActionTable& table, std::size_t i, RbMatrix& x) {
  for (int k = 0; k < table.num_rbs(); ++k) {
    const int u = table.holder(i, k);
    if (u >= 0) x.at(u, k) = 1;
  }
}

// Per-feature z-normalisation of the log-gain block.
struct StateNormalizer {
  Vector mean;
  Vector stddev;

  static StateNormalizer identity(Eigen::Index n) { return {Vector::Zero(n), Vector::Ones(n)}; }

  // samples: one log-gain block per column.
  static StateNormalizer fit(const ColMatrix& samples) {
    StateNormalizer s;
    const auto n = samples.cols();
    s.mean = samples.rowwise().mean();
    s.stddev = Vector::Ones(samples.rows());
    if (n > 1) {
      for (Eigen::Index r = 0; r < samples.rows(); ++r) {
        const double var = (samples.row(r).array() - s.mean[r]).square().sum() / static_cast<double>(n - 1);
        const double sd = std::sqrt(var);
        s.stddev[r] = sd > 1e-12 ? sd : 1.0;
      }
    }
    return s;
  }
};

inline constexpr double kGainFloor = 1e-20;

inline std::size_t encoded_state_size(std::size_t users, int num_rbs) {
  return users * static_cast<std::size_t>(num_rbs) + static_cast<std::size_t>(num_rbs) + 2;
}

// log10(gain + 1e-20) for each (user, RB), users in the given order.
inline Vector log_gain_block(const ChannelState& ch, const std::vector<int>& users) {
  Vector v(static_cast<Eigen::Index>(users.size()) * ch.rbs);
  Eigen::Index i = 0;
  for (int u : users)
    for (int k = 0; k < ch.rbs; ++k) v[i++] = std::log10(ch.at(u, k) + kGainFloor);
  return v;
}

// [normalised log gains | ownership bits | R_min (Mbps) | D_max (ms)]
inline Vector encode_state(const ChannelState& ch, const std::vector<int>& users,
                           std::uint64_t owned_mask, const QosThresholds& qos,
                           const StateNormalizer& norm) {
  const Vector g = log_gain_block(ch, users);
  if (norm.mean.size() != g.size() || norm.stddev.size() != g.size())
    throw ShapeError("state normaliser does not match the gain block");
  const auto k = static_cast<Eigen::Index>(ch.rbs);
  Vector s(g.size() + k + 2);
  s.head(g.size()) = (g - norm.mean).cwiseQuotient(norm.stddev);
  for (Eigen::Index r = 0; r < k; ++r) s[g.size() + r] = ((owned_mask >> r) & 1U) ? 1.0 : 0.0;
  s[g.size() + k] = qos.r_min_bps / 1e6;
  s[g.size() + k + 1] = qos.d_max_s * 1e3;
  return s;
}

}  // namespace samarl::neural

#endif  // SAMARL_NEURAL_AGENT_SPACE_HPP
