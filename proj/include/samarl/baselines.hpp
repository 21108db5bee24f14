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

#ifndef SAMARL_BASELINES_HPP
#define SAMARL_BASELINES_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "samarl/allocation.hpp"
#include "samarl/netmodel.hpp"

namespace samarl {

struct UserQueue {
  int user = 0;
  double queue_len_bits = 0.0;
};

struct OneSraOptions {
  double slot_s = 1e-3;
};

// Even contiguous split used when a policy has no controller of its own:
// gNodeB b gets a block of K/B RBs, the first K mod B gNodeBs one extra.
inline ControllerAssignment even_partition(int num_gnbs, int num_rbs) {
  ControllerAssignment a;
  const int base = num_rbs / num_gnbs;
  const int extra = num_rbs % num_gnbs;
  for (int b = 0; b < num_gnbs; ++b) a.owner.insert(a.owner.end(), base + (b < extra ? 1 : 0), b);
  return a;
}

// Greedy single-stage scheduler. Per gNodeB, URLLC users first (then by
// id): take the strongest free owned RB, derive the spectral efficiency,
// size the grant as ceil(queue / (SE * W * slot)) capped at K_max, and fill
// it with free owned RBs in descending SNR order. Never borrows.
inline Allocation one_sra_schedule(const NetworkInstance& net, const ChannelState& ch,
                                   const ControllerAssignment& assignment,
                                   const OneSraOptions& opt = {}) {
  Allocation alloc = Allocation::empty(net, assignment);
  std::vector<bool> taken(net.num_rbs, false);
  for (int b = 0; b < net.num_gnbs(); ++b) {
    std::vector<int> order = net.users_of(b);
    std::stable_sort(order.begin(), order.end(), [&](int l, int r) {
      return net.users[l].slice == SliceKind::Urllc && net.users[r].slice != SliceKind::Urllc;
    });
    for (int uid : order) {
      const UserQueue queue{uid, net.users[uid].packet_len_bits};
      std::vector<int> free;
      for (int k = 0; k < net.num_rbs; ++k)
        if (assignment.owns(b, k) && !taken[k]) free.push_back(k);
      if (free.empty()) continue;
      std::stable_sort(free.begin(), free.end(),
                       [&](int l, int r) { return ch.at(uid, l) > ch.at(uid, r); });
      const double se = std::log2(1.0 + snr(ch.at(uid, free.front()), net.phys));
      if (!(se > 0.0)) continue;
      const double per_rb_bits = se * net.phys.rb_bandwidth_hz * opt.slot_s;
      int need = static_cast<int>(std::ceil(queue.queue_len_bits / per_rb_bits));
      need = std::clamp(need, 1, net.k_max);
      for (int i = 0; i < need && i < static_cast<int>(free.size()); ++i) {
        alloc.x.at(uid, free[i]) = 1;
        taken[free[i]] = true;
      }
    }
  }
  return alloc;
}

}  // namespace samarl

#endif  // SAMARL_BASELINES_HPP
