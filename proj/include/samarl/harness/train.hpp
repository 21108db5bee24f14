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

// Two time-scale training. Each EXP3 round picks a partition, the gNodeB
// agents run one episode of epsilon-greedy steps (store, train after every
// step), and the episode-mean objective in Mbps goes back to EXP3.
//
// Output directory layout:
//   metrics.csv              one row per step
//   episodes.csv             one row per episode
//   exp3_weights.csv         controller weights after every round
//   agents/<b>.bin           trial 0 networks; other trials in agents/trial<t>/
//   agents/model.json        topology, normalisers, final EXP3 weights
//   agents/snapshots/ep<N>/  periodic network snapshots (trial 0)

#ifndef SAMARL_HARNESS_TRAIN_HPP
#define SAMARL_HARNESS_TRAIN_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "samarl/allocation.hpp"
#include "samarl/errors.hpp"
#include "samarl/exp3.hpp"
#include "samarl/harness/config.hpp"
#include "samarl/harness/metrics.hpp"
#include "samarl/harness/scenario.hpp"
#include "samarl/netmodel.hpp"
#include "samarl/neural/checkpoint.hpp"
#include "samarl/neural/ddqn.hpp"
#include "samarl/neural/reward.hpp"
#include "samarl/random.hpp"

namespace samarl::harness {

struct EpisodeRecord {
  int trial = 0;
  int episode = 0;
  int exp3_arm = 0;
  double epsilon = 0.0;
  double agent_reward = 0.0;          // mean over steps and agents
  std::vector<double> rewards;        // per agent, mean over steps
  double mean_loss = 0.0;             // mean over training steps; NaN if none
  double objective_mbps = 0.0;        // mean over steps
  double embb_satisfied = 0.0;        // mean over steps
  double urllc_satisfied = 0.0;
  int infeasible_actions = 0;         // sum over steps
};

// Called once per step with the resolved allocation and the channel it
// was scored on.
using StepObserver = std::function<void(const MetricsRecord&, const Allocation&, const ChannelState&,
                                        const NetworkInstance&)>;

struct TrainOptions {
  StepObserver observer;
  bool quiet = true;
};

struct TrainResult {
  std::vector<MetricsRecord> steps;
  std::vector<EpisodeRecord> episodes;
};

struct QosCounts {
  int embb = 0;
  int urllc = 0;
};

inline QosCounts count_satisfied(const Allocation& alloc, const ChannelState& ch, const NetworkInstance& net) {
  const auto rep = check_qos(alloc, ch, net);
  QosCounts c;
  for (const auto& u : net.users)
    if (rep.satisfied[u.id]) (u.slice == SliceKind::Embb ? c.embb : c.urllc) += 1;
  return c;
}

inline std::filesystem::path agent_dir(const std::filesystem::path& out, int trial) {
  return trial == 0 ? out / "agents" : out / "agents" / ("trial" + std::to_string(trial));
}

inline std::filesystem::path checkpoint_path(const std::filesystem::path& dir, int gnb) {
  return dir / (std::to_string(gnb) + ".bin");
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError(p.string() + ": cannot open for writing");
  return os;
}

inline void write_episode_header(std::ostream& os, int agents) {
  os << "trial,episode,exp3_arm,epsilon,agent_reward";
  for (int b = 0; b < agents; ++b) os << ",reward_" << b;
  os << ",mean_loss,objective_mbps,embb_satisfied,urllc_satisfied,infeasible_actions\n";
}

inline void write_episode_row(std::ostream& os, const EpisodeRecord& e) {
  os << e.trial << ',' << e.episode << ',' << e.exp3_arm << ',' << format_g9(e.epsilon) << ','
     << format_g9(e.agent_reward);
  for (double r : e.rewards) os << ',' << format_g9(r);
  os << ',' << format_g9(e.mean_loss) << ',' << format_g9(e.objective_mbps) << ',' << format_g9(e.embb_satisfied)
     << ',' << format_g9(e.urllc_satisfied) << ',' << e.infeasible_actions << '\n';
}

inline void save_agents(const std::filesystem::path& dir, const std::vector<neural::DdqnAgent>& agents) {
  for (const auto& a : agents) neural::save_checkpoint(checkpoint_path(dir, a.gnb()), a.main());
}

}  // namespace detail

inline std::vector<std::uint64_t> owned_masks(const ControllerAssignment& a, int agents) {
  std::vector<std::uint64_t> m;
  for (int b = 0; b < agents; ++b) m.push_back(a.owned_mask(b));
  return m;
}

inline neural::Vector agent_state(const Scenario& sc, const ChannelState& ch, int b, std::uint64_t mask) {
  return neural::encode_state(ch, sc.users[b], mask, sc.net.qos, sc.norms[b]);
}

// Runs every trial and writes the files listed above to `out`.
inline TrainResult train(const RunConfig& cfg, const std::filesystem::path& out, const TrainOptions& opt = {}) {
  cfg.validate();
  std::filesystem::create_directories(out);
  auto metrics_os = detail::open_out(out / "metrics.csv");
  auto episodes_os = detail::open_out(out / "episodes.csv");
  auto weights_os = detail::open_out(out / "exp3_weights.csv");
  metrics_os << metrics_header() << '\n';

  TrainResult result;
  const int E = cfg.loop.episodes;
  const int S = cfg.loop.steps_per_episode;

  for (int trial = 0; trial < cfg.loop.trials; ++trial) {
    const auto t = static_cast<std::uint64_t>(trial);
    Scenario sc = build_scenario(cfg, trial);
    const int B = sc.num_agents();
    if (trial == 0) detail::write_episode_header(episodes_os, B);
    if (trial == 0) {
      weights_os << "trial,round";
      for (std::size_t i = 0; i < sc.controller.size(); ++i) weights_os << ",w" << i;
      weights_os << '\n';
    }

    std::vector<neural::DdqnAgent> agents;
    std::vector<RngStream> explore, replay;
    for (int b = 0; b < B; ++b) {
      const auto key = streams::agent_key(trial, b);
      RngStream init = derive_stream(cfg.seed, streams::kInit, key);
      agents.emplace_back(b, sc.tables[b], sc.state_size(b), cfg.hyper, init);
      explore.push_back(derive_stream(cfg.seed, streams::kExplore, key));
      replay.push_back(derive_stream(cfg.seed, streams::kReplay, key));
    }
    std::vector<const neural::AgentActionTable*> tables;
    for (const auto& a : agents) tables.push_back(&a.table());

    Exp3 exp3(sc.controller.size(), cfg.loop.exp3_alpha);
    RngStream exp3_rng = derive_stream(cfg.seed, streams::kExp3, t);
    RngStream chan_rng = derive_stream(cfg.seed, streams::kChannel, t);
    RngStream pos_rng = derive_stream(cfg.seed, streams::kPositions, t);
    NetworkInstance& net = sc.net;

    for (int ep = 0; ep < E; ++ep) {
      if (ep > 0 && ep % cfg.loop.reposition_every == 0) redraw_positions(net, pos_rng);
      const auto arm = exp3.select(exp3_rng);
      const ControllerAssignment& assignment = sc.controller[arm];
      const auto masks = owned_masks(assignment, B);

      ChannelState ch = sample_channel(net, chan_rng);
      std::vector<neural::Vector> states;
      for (int b = 0; b < B; ++b) states.push_back(agent_state(sc, ch, b, masks[b]));

      EpisodeRecord er;
      er.trial = trial;
      er.episode = ep;
      er.exp3_arm = static_cast<int>(arm);
      er.rewards.assign(B, 0.0);
      double loss_sum = 0.0;
      int loss_n = 0;

      for (int s = 0; s < S; ++s) {
        std::vector<int> rows(B);
        for (int b = 0; b < B; ++b) rows[b] = neural::epsilon_greedy(agents[b], states[b], masks[b], explore[b]).action;
        const auto joint = neural::JointAction::from_rows(tables, rows);
        const auto outcome = neural::resolve_joint(joint, assignment, net);

        MetricsRecord rec;
        rec.trial = trial;
        rec.episode = ep;
        rec.step = s;
        rec.exp3_arm = static_cast<int>(arm);
        std::vector<double> rewards(B);
        for (int b = 0; b < B; ++b) {
          rewards[b] = neural::agent_reward(joint, outcome, assignment, ch, net, b);
          if (rewards[b] < 0.0) ++rec.infeasible_actions;
          rec.agent_reward += rewards[b] / B;
          er.rewards[b] += rewards[b] / S;
        }
        rec.objective_mbps = objective(outcome.resolved, ch, net) / 1e6;
        const auto counts = count_satisfied(outcome.resolved, ch, net);
        rec.embb_satisfied = counts.embb;
        rec.urllc_satisfied = counts.urllc;

        const ChannelState next_ch = sample_channel(net, chan_rng);
        std::vector<neural::Vector> next_states;
        double step_loss = 0.0;
        int trained = 0;
        for (int b = 0; b < B; ++b) {
          next_states.push_back(agent_state(sc, next_ch, b, masks[b]));
          agents[b].replay().push({states[b], rows[b], rewards[b], next_states[b], masks[b]});
          if (const auto loss = neural::train_step(agents[b], replay[b])) {
            step_loss += *loss;
            ++trained;
          }
        }
        rec.mean_loss = trained ? step_loss / trained : std::numeric_limits<double>::quiet_NaN();
        if (trained) {
          loss_sum += rec.mean_loss;
          ++loss_n;
        }
        for (const auto& a : agents) rec.epsilon += a.epsilon() / B;

        if (opt.observer) opt.observer(rec, outcome.resolved, ch, net);
        metrics_os << format_record(rec) << '\n';
        result.steps.push_back(rec);

        er.agent_reward += rec.agent_reward / S;
        er.objective_mbps += rec.objective_mbps / S;
        er.embb_satisfied += static_cast<double>(rec.embb_satisfied) / S;
        er.urllc_satisfied += static_cast<double>(rec.urllc_satisfied) / S;
        er.infeasible_actions += rec.infeasible_actions;
        er.epsilon = rec.epsilon;

        ch = next_ch;
        states = std::move(next_states);
      }

      exp3.update(arm, er.objective_mbps);
      er.mean_loss = loss_n ? loss_sum / loss_n : std::numeric_limits<double>::quiet_NaN();
      detail::write_episode_row(episodes_os, er);
      weights_os << trial << ',';
      write_weights_row(weights_os, exp3.round(), exp3.weights());
      result.episodes.push_back(er);

      if (trial == 0 && cfg.loop.checkpoint_every > 0 && (ep + 1) % cfg.loop.checkpoint_every == 0 && ep + 1 < E) {
        char name[32];
        std::snprintf(name, sizeof name, "ep%05d", ep + 1);
        detail::save_agents(out / "agents" / "snapshots" / name, agents);
      }
      if (!opt.quiet && (ep + 1) % 100 == 0)
        std::fprintf(stderr, "trial %d episode %d/%d reward %.4f objective %.4f epsilon %.4f\n", trial, ep + 1, E,
                     er.agent_reward, er.objective_mbps, er.epsilon);
    }

    const auto dir = agent_dir(out, trial);
    detail::save_agents(dir, agents);
    // The stored topology is the one the trial started from.
    Scenario saved = sc;
    saved.net = trial_topology(cfg, trial);
    save_model_file(dir / "model.json", saved, exp3.weights());
  }
  if (!metrics_os || !episodes_os || !weights_os) throw IoError(out.string() + ": failed writing training outputs");
  return result;
}

}  // namespace samarl::harness

#endif  // SAMARL_HARNESS_TRAIN_HPP
