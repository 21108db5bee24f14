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

// Double-DQN agent for one gNodeB.
//
// The main network picks the bootstrap action, the target network scores
// it; the target is a frozen copy refreshed every `target_update_interval`
// training steps. Action selection is restricted to the rows legal under
// the current controller partition.

#ifndef SAMARL_NEURAL_DDQN_HPP
#define SAMARL_NEURAL_DDQN_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "samarl/errors.hpp"
#include "samarl/neural/adam.hpp"
#include "samarl/neural/agent_space.hpp"
#include "samarl/neural/mlp.hpp"
#include "samarl/neural/replay.hpp"
#include "samarl/random.hpp"

namespace samarl::neural {

struct DdqnConfig {
  std::vector<int> hidden = {256, 256};
  double learning_rate = 0.001;
  double gamma = 0.996;
  double epsilon_start = 1.0;
  double epsilon_min = 0.01;
  double epsilon_decay = 0.9995;
  std::size_t replay_capacity = 100000;
  std::size_t batch_size = 64;
  std::uint64_t target_update_interval = 1000;
};

// Index of the largest entry among legal ones; lowest index wins ties.
// An empty mask means every entry is legal.
inline int masked_argmax(const Eigen::Ref<const Vector>& q, const ActionMask& mask) {
  int best = -1;
  double best_q = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (!mask.empty() && !mask[i]) continue;
    if (best < 0 || q[i] > best_q) {
      best = static_cast<int>(i);
      best_q = q[i];
    }
  }
  if (best < 0) throw Error("no legal action");
  return best;
}

class DdqnAgent {
 public:
  DdqnAgent(int gnb, AgentActionTable table, int state_size, const DdqnConfig& cfg, RngStream& init)
      : gnb_(gnb), table_(std::move(table)), cfg_(cfg), replay_(cfg.replay_capacity),
        epsilon_(cfg.epsilon_start) {
    if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
    if (!(cfg.epsilon_min >= 0.0 && cfg.epsilon_min <= cfg.epsilon_start && cfg.epsilon_start <= 1.0))
      throw ConfigError("need 0 <= epsilon_min <= epsilon_start <= 1");
    if (cfg.batch_size == 0) throw ConfigError("batch size must be >= 1");
    if (cfg.target_update_interval == 0) throw ConfigError("target update interval must be >= 1");
    std::vector<int> sizes{state_size};
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(static_cast<int>(table_.size()));
    main_ = Mlp::random(sizes, init);
    target_ = main_;
    adam_ = AdamState(main_, cfg.learning_rate);
  }

  int gnb() const { return gnb_; }
  const AgentActionTable& table() const { return table_; }
  const DdqnConfig& config() const { return cfg_; }
  const Mlp& main() const { return main_; }
  Mlp& main() { return main_; }
  const Mlp& target() const { return target_; }
  Mlp& target() { return target_; }
  const AdamState& adam() const { return adam_; }
  ReplayBuffer& replay() { return replay_; }
  const ReplayBuffer& replay() const { return replay_; }
  double epsilon() const { return epsilon_; }
  void set_epsilon(double e) { epsilon_ = std::clamp(e, cfg_.epsilon_min, 1.0); }
  std::uint64_t train_steps() const { return train_steps_; }

  void sync_target() { target_ = main_; }

  const ActionMask& legal(std::uint64_t owned_mask) {
    auto it = masks_.find(owned_mask);
    if (it == masks_.end()) it = masks_.emplace(owned_mask, legal_rows(table_, owned_mask)).first;
    return it->second;
  }

  // Bookkeeping after one applied gradient step.
  void after_train_step() {
    ++train_steps_;
    if (train_steps_ % cfg_.target_update_interval == 0) sync_target();
    epsilon_ = std::max(cfg_.epsilon_min, epsilon_ * cfg_.epsilon_decay);
  }

  AdamState& adam_state() { return adam_; }

 private:
  int gnb_;
  AgentActionTable table_;
  DdqnConfig cfg_;
  Mlp main_;
  Mlp target_;
  AdamState adam_;
  ReplayBuffer replay_;
  double epsilon_;
  std::uint64_t train_steps_ = 0;
  std::unordered_map<std::uint64_t, ActionMask> masks_;
};

inline int act_greedy(const Mlp& net, const Vector& state, const ActionMask& mask = {}) {
  return masked_argmax(net.forward(state), mask);
}

struct EpsilonChoice {
  int action = 0;
  bool explored = false;
};

// With probability epsilon a uniform legal action, otherwise the greedy one.
inline EpsilonChoice epsilon_greedy(const Mlp& net, double epsilon, const Vector& state,
                                    const ActionMask& mask, RngStream& rng) {
  if (rng.uniform() < epsilon) {
    std::vector<int> legal;
    const auto n = static_cast<std::size_t>(net.output_size());
    if (mask.empty()) {
      return {static_cast<int>(rng.below(n)), true};
    }
    for (std::size_t i = 0; i < n; ++i)
      if (mask[i]) legal.push_back(static_cast<int>(i));
    if (legal.empty()) throw Error("no legal action");
    return {legal[rng.below(legal.size())], true};
  }
  return {act_greedy(net, state, mask), false};
}

inline EpsilonChoice epsilon_greedy(DdqnAgent& agent, const Vector& state, std::uint64_t owned_mask,
                                    RngStream& rng) {
  return epsilon_greedy(agent.main(), agent.epsilon(), state, agent.legal(owned_mask), rng);
}

// y = r + gamma * Q_target(s', argmax_a Q_main(s', a)). `masks[i]` restricts
// the argmax for sample i (empty = unrestricted).
inline Vector compute_targets(const std::vector<const Experience*>& batch, const Mlp& main,
                              const Mlp& target, double gamma,
                              const std::vector<const ActionMask*>& masks = {}) {
  const auto n = static_cast<Eigen::Index>(batch.size());
  Vector y(n);
  if (n == 0) return y;
  if (main.sizes() != target.sizes()) throw ShapeError("main and target networks differ in shape");
  if (gamma == 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) y[i] = batch[i]->reward;
    return y;
  }
  ColMatrix next(main.input_size(), n);
  for (Eigen::Index i = 0; i < n; ++i) next.col(i) = batch[i]->next_state;
  const ColMatrix q_main = main.forward_batch(next);
  const ColMatrix h_target = target.trunk(next);
  static const ActionMask kAll;
  for (Eigen::Index i = 0; i < n; ++i) {
    const ActionMask& m = masks.empty() || masks[i] == nullptr ? kAll : *masks[i];
    const int a = masked_argmax(q_main.col(i), m);
    y[i] = batch[i]->reward + gamma * target.output_from_trunk(h_target.col(i), a);
  }
  return y;
}

// One minibatch update. Returns nullopt (and changes nothing) while the
// replay memory holds fewer than batch_size experiences.
inline std::optional<double> train_step(DdqnAgent& agent, RngStream& rng) {
  const auto& cfg = agent.config();
  if (agent.replay().size() < cfg.batch_size) return std::nullopt;
  const auto picks = agent.replay().sample(cfg.batch_size, rng);
  std::vector<const Experience*> batch;
  std::vector<const ActionMask*> masks;
  std::vector<int> actions;
  ColMatrix states(agent.main().input_size(), static_cast<Eigen::Index>(picks.size()));
  for (std::size_t i = 0; i < picks.size(); ++i) {
    const Experience& e = agent.replay()[picks[i]];
    batch.push_back(&e);
    masks.push_back(&agent.legal(e.next_owned_mask));
    actions.push_back(e.action);
    states.col(static_cast<Eigen::Index>(i)) = e.state;
  }
  const Vector y = compute_targets(batch, agent.main(), agent.target(), cfg.gamma, masks);
  auto res = gradients(agent.main(), states, actions, y);
  adam_step(agent.main(), res.grads, agent.adam_state());
  agent.after_train_step();
  return res.loss;
}

}  // namespace samarl::neural

#endif  // SAMARL_NEURAL_DDQN_HPP
