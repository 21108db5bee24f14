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

// Exact solvers for desk-scale instances.
//
// exhaustive_solve enumerates every map RB -> {unassigned, user} for a fixed
// controller partition and keeps the best allocation passing every
// constraint (cap, exclusivity, borrowing, QoS). Ties go to the lexicographically smallest x (row-major,
// user-major). exhaustive_solve_joint adds the outer loop over partitions
// in lexicographic owner order; a later partition only wins on a strictly
// larger value.
//
// knapsack_solve is the textbook O(nC) dynamic program.

#ifndef SAMARL_ORACLE_HPP
#define SAMARL_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "samarl/allocation.hpp"
#include "samarl/errors.hpp"
#include "samarl/netmodel.hpp"

namespace samarl {

inline constexpr double kOracleSearchBound = 1e7;

struct OracleSolution {
  Allocation best_alloc;
  double best_value = 0.0;
  std::uint64_t explored = 0;
  // False when no candidate passed every constraint; best_alloc is then empty.
  bool feasible = false;
};

namespace detail {

// Precomputed per-(user, RB) link rates and the inner feasibility test,
// evaluated without allocating.
class InnerSearch {
 public:
  InnerSearch(const NetworkInstance& net, const ChannelState& ch)
      : net_(net), users_(net.num_users()), rbs_(net.num_rbs),
        rate_(static_cast<std::size_t>(users_) * rbs_) {
    for (int u = 0; u < users_; ++u)
      for (int k = 0; k < rbs_; ++k)
        rate_[static_cast<std::size_t>(u) * rbs_ + k] = link_rate(ch.at(u, k), net.phys);
  }

  OracleSolution solve(const ControllerAssignment& assignment) const {
    OracleSolution sol;
    sol.best_alloc = Allocation::empty(net_, assignment);

    // choice[k] in [-1, U): the user holding RB k, -1 = unassigned.
    std::vector<int> choice(rbs_, -1);
    std::vector<int> count(users_);
    RbMatrix best(users_, rbs_);
    RbMatrix cur(users_, rbs_);
    bool have = false;
    double best_value = 0.0;

    for (;;) {
      ++sol.explored;
      double value = 0.0;
      if (feasible(choice, assignment, count, value)) {
        fill(choice, cur);
        if (!have || value > best_value || (value == best_value && cur.bits < best.bits)) {
          best = cur;
          best_value = value;
          have = true;
        }
      }
      int k = rbs_ - 1;
      while (k >= 0 && choice[k] == users_ - 1) {
        choice[k] = -1;
        --k;
      }
      if (k < 0) break;
      ++choice[k];
    }
    if (have) {
      sol.best_alloc.x = best;
      sol.best_value = best_value;
      sol.feasible = true;
    }
    return sol;
  }

 private:
  void fill(const std::vector<int>& choice, RbMatrix& x) const {
    std::fill(x.bits.begin(), x.bits.end(), std::uint8_t{0});
    for (int k = 0; k < rbs_; ++k)
      if (choice[k] >= 0) x.at(choice[k], k) = 1;
  }

  bool feasible(const std::vector<int>& choice, const ControllerAssignment& a,
                std::vector<int>& count, double& value) const {
    std::fill(count.begin(), count.end(), 0);
    for (int k = 0; k < rbs_; ++k)
      if (choice[k] >= 0 && ++count[choice[k]] > net_.k_max) return false;
    // OFDMA holds by construction: one user per RB.
    for (int b = 0; b < net_.num_gnbs(); ++b) {
      int owned = 0, owned_used = 0;
      bool borrows = false;
      for (int k = 0; k < rbs_; ++k) {
        const bool mine = a.owner[k] == b;
        owned += mine;
        if (choice[k] < 0 || net_.users[choice[k]].home_gnb != b) continue;
        if (mine)
          ++owned_used;
        else
          borrows = true;
      }
      if (borrows && owned_used != owned) return false;
    }
    // Summation order matches objective(): users ascending, RBs ascending.
    value = 0.0;
    for (int u = 0; u < users_; ++u) {
      double r = 0.0;
      for (int k = 0; k < rbs_; ++k)
        if (choice[k] == u) r += rate_[static_cast<std::size_t>(u) * rbs_ + k];
      const auto& usr = net_.users[u];
      if (!user_qos_satisfied(usr, r, packet_delay(r, usr.packet_len_bits, usr.arrival_rate_pps),
                              net_.qos))
        return false;
      value += r;
    }
    return true;
  }

  const NetworkInstance& net_;
  int users_;
  int rbs_;
  std::vector<double> rate_;
};

inline double search_size(int base, int exponent) {
  return std::pow(static_cast<double>(base), static_cast<double>(exponent));
}

}  // namespace detail

inline OracleSolution exhaustive_solve(const NetworkInstance& net, const ChannelState& ch,
                                       const ControllerAssignment& assignment) {
  if (detail::search_size(net.num_users() + 1, net.num_rbs) > kOracleSearchBound)
    throw SizeError("exhaustive search space (U+1)^K exceeds 1e7");
  if (assignment.num_rbs() != net.num_rbs) throw ShapeError("assignment size != K");
  return detail::InnerSearch(net, ch).solve(assignment);
}

inline OracleSolution exhaustive_solve_joint(const NetworkInstance& net, const ChannelState& ch) {
  if (detail::search_size(net.num_gnbs(), net.num_rbs) *
          detail::search_size(net.num_users() + 1, net.num_rbs) >
      kOracleSearchBound)
    throw SizeError("joint search space B^K (U+1)^K exceeds 1e7");
  const detail::InnerSearch inner(net, ch);
  OracleSolution best;
  std::uint64_t explored = 0;
  bool first = true;
  for (const auto& a : all_partitions(net.num_gnbs(), net.num_rbs)) {
    auto sol = inner.solve(a);
    explored += sol.explored;
    if (first || (sol.feasible && (!best.feasible || sol.best_value > best.best_value))) {
      best = std::move(sol);
      first = false;
    }
  }
  best.explored = explored;
  return best;
}

struct KnapsackItem {
  double profit = 0.0;
  std::int64_t weight = 0;
};

struct KnapsackInstance {
  std::vector<KnapsackItem> items;
  std::int64_t capacity = 0;
};

struct KnapsackSolution {
  std::vector<int> subset;  // ascending item indices
  double value = 0.0;
};

inline KnapsackSolution knapsack_solve(const KnapsackInstance& inst) {
  const std::size_t n = inst.items.size();
  const std::int64_t cap = inst.capacity;
  if (cap < 0) throw ConfigError("knapsack capacity must be >= 0");
  for (const auto& it : inst.items)
    if (it.weight < 0) throw ConfigError("knapsack weights must be >= 0");
  if (static_cast<double>(cap) > 1e6 * static_cast<double>(std::max<std::size_t>(n, 1)))
    throw SizeError("knapsack capacity exceeds the DP table bound");

  const auto width = static_cast<std::size_t>(cap) + 1;
  std::vector<double> table((n + 1) * width, 0.0);
  auto at = [&](std::size_t i, std::int64_t c) -> double& {
    return table[i * width + static_cast<std::size_t>(c)];
  };
  for (std::size_t i = 1; i <= n; ++i) {
    const auto& it = inst.items[i - 1];
    for (std::int64_t c = 0; c <= cap; ++c) {
      double v = at(i - 1, c);
      if (it.weight <= c) v = std::max(v, at(i - 1, c - it.weight) + it.profit);
      at(i, c) = v;
    }
  }
  KnapsackSolution sol;
  sol.value = at(n, cap);
  std::int64_t c = cap;
  for (std::size_t i = n; i > 0; --i) {
    if (at(i, c) != at(i - 1, c)) {
      sol.subset.push_back(static_cast<int>(i - 1));
      c -= inst.items[i - 1].weight;
    }
  }
  std::reverse(sol.subset.begin(), sol.subset.end());
  return sol;
}

// Single-gNodeB, eMBB-only restriction with a fixed bundle size per user:
// item i is "serve user i on bundle_sizes[i] owned RBs". Profits are the
// rate over the first bundle_sizes[i] owned RBs, which equals the bundle
// rate on any equally sized subset when a user's gain is flat across the
// owned RBs.
inline KnapsackInstance reduce_to_knapsack(const NetworkInstance& net, const ChannelState& ch,
                                           const ControllerAssignment& assignment, int gnb,
                                           const std::vector<int>& bundle_sizes) {
  const auto owned = assignment.owned_by(gnb);
  const auto users = net.users_of(gnb);
  if (bundle_sizes.size() != users.size())
    throw ShapeError("one bundle size per user of the gNodeB is required");
  KnapsackInstance inst;
  inst.capacity = static_cast<std::int64_t>(owned.size());
  for (std::size_t i = 0; i < users.size(); ++i) {
    KnapsackItem item;
    item.weight = bundle_sizes[i];
    for (int j = 0; j < bundle_sizes[i] && j < static_cast<int>(owned.size()); ++j)
      item.profit += link_rate(ch.at(users[i], owned[j]), net.phys);
    inst.items.push_back(item);
  }
  return inst;
}

}  // namespace samarl

#endif  // SAMARL_ORACLE_HPP
