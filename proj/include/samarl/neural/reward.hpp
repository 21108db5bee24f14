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

// Joint actions and per-agent rewards.
//
// A borrowed RB is in conflict when its owner also uses it, or when more
// than one non-owner claims it. Every borrower of a conflicted RB is
// infeasible. The owner keeps an RB it uses itself; an RB claimed by two or
// more borrowers (and not by its owner) is left unassigned.

#ifndef SAMARL_NEURAL_REWARD_HPP
#define SAMARL_NEURAL_REWARD_HPP

#include <vector>

#include "samarl/allocation.hpp"
#include "samarl/errors.hpp"
#include "samarl/netmodel.hpp"
#include "samarl/neural/agent_space.hpp"

namespace samarl::neural {

// holders[b][k]: global user id agent b puts on RB k, or -1.
struct JointAction {
  std::vector<std::vector<int>> holders;

  static JointAction from_rows(const std::vector<const AgentActionTable*>& tables,
                               const std::vector<int>& rows) {
    JointAction j;
    for (std::size_t b = 0; b < tables.size(); ++b) {
      const auto& t = *tables[b];
      std::vector<int> h(t.num_rbs(), -1);
      for (int k = 0; k < t.num_rbs(); ++k) h[k] = t.holder(static_cast<std::size_t>(rows[b]), k);
      j.holders.push_back(std::move(h));
    }
    return j;
  }
};

struct JointOutcome {
  Allocation resolved;
  std::vector<bool> conflicted;  // per agent
};

inline JointOutcome resolve_joint(const JointAction& joint, const ControllerAssignment& assignment,
                                  const NetworkInstance& net) {
  const int B = net.num_gnbs();
  const int K = net.num_rbs;
  if (static_cast<int>(joint.holders.size()) != B) throw ShapeError("joint action needs one row per gNodeB");
  JointOutcome out;
  out.resolved = Allocation::empty(net, assignment);
  out.conflicted.assign(B, false);
  for (int k = 0; k < K; ++k) {
    const int owner = assignment.owner[k];
    const bool owner_uses = joint.holders[owner][k] >= 0;
    int borrowers = 0;
    int sole = -1;
    for (int b = 0; b < B; ++b) {
      if (b == owner || joint.holders[b][k] < 0) continue;
      ++borrowers;
      sole = b;
    }
    if (owner_uses) out.resolved.x.at(joint.holders[owner][k], k) = 1;
    if (borrowers == 0) continue;
    if (owner_uses || borrowers > 1) {
      for (int b = 0; b < B; ++b)
        if (b != owner && joint.holders[b][k] >= 0) out.conflicted[b] = true;
    } else {
      out.resolved.x.at(joint.holders[sole][k], k) = 1;
    }
  }
  return out;
}

// Feasibility of agent b's own row (cap, borrowing, QoS), ignoring the rest of
// the joint action.
inline bool row_feasible(const JointAction& joint, const ControllerAssignment& assignment,
                         const ChannelState& ch, const NetworkInstance& net, int b) {
  Allocation own = Allocation::empty(net, assignment);
  for (int k = 0; k < net.num_rbs; ++k) {
    const int u = joint.holders[b][k];
    if (u < 0) continue;
    if (net.users[u].home_gnb != b) return false;
    own.x.at(u, k) = 1;
  }
  if (!check_borrowing_of(own, net, b)) return false;
  const auto qos = check_qos(own, ch, net);
  for (const auto& u : net.users) {
    if (u.home_gnb != b) continue;
    if (own.x.row_count(u.id) > net.k_max) return false;
    if (!qos.satisfied[u.id]) return false;
  }
  return true;
}

// -1 when b's action is infeasible or loses a borrowing conflict, otherwise
// the sum rate of b's users in Mbps.
inline double agent_reward(const JointAction& joint, const JointOutcome& outcome,
                           const ControllerAssignment& assignment, const ChannelState& ch,
                           const NetworkInstance& net, int b) {
  if (outcome.conflicted[b] || !row_feasible(joint, assignment, ch, net, b)) return -1.0;
  double r = 0.0;
  for (const auto& u : net.users) {
    if (u.home_gnb != b) continue;
    for (int k = 0; k < net.num_rbs; ++k)
      if (joint.holders[b][k] == u.id) r += link_rate(ch.at(u.id, k), net.phys);
  }
  return r / 1e6;
}

inline double agent_reward(const JointAction& joint, const ControllerAssignment& assignment,
                           const ChannelState& ch, const NetworkInstance& net, int b) {
  return agent_reward(joint, resolve_joint(joint, assignment, net), assignment, ch, net, b);
}

}  // namespace samarl::neural

#endif  // SAMARL_NEURAL_REWARD_HPP
