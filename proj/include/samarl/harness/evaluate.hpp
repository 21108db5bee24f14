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

// Policy rollouts. Every evaluation trial redraws user positions (keeping
// the association) and runs steps_per_episode fresh channel draws; the
// draws depend only on (seed, trial), so all policies see the same ones.
//
// sama-rl: EXP3 arm with the largest final weight, greedy masked argmax per
// agent, joint action resolved as in training. 1sra: even contiguous
// partition. oracle: exhaustive joint search (tiny scenarios only).
//
// The reported objective is the sum rate of the allocation actually
// applied; whether that allocation met every constraint is reported
// separately as feasible_fraction.

#ifndef SAMARL_HARNESS_EVALUATE_HPP
#define SAMARL_HARNESS_EVALUATE_HPP

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "samarl/allocation.hpp"
#include "samarl/baselines.hpp"
#include "samarl/errors.hpp"
#include "samarl/harness/config.hpp"
#include "samarl/harness/metrics.hpp"
#include "samarl/harness/scenario.hpp"
#include "samarl/harness/train.hpp"
#include "samarl/neural/checkpoint.hpp"
#include "samarl/neural/ddqn.hpp"
#include "samarl/neural/reward.hpp"
#include "samarl/oracle.hpp"

namespace samarl::harness {

struct EvalRow {
  int trial = 0;
  double objective_mbps = 0.0;
  double embb_satisfied = 0.0;
  double urllc_satisfied = 0.0;
  double feasible_fraction = 0.0;
  int infeasible_actions = 0;
};

struct EvalSummary {
  Policy policy = Policy::SamaRl;
  std::vector<EvalRow> trials;
  double objective_mbps = 0.0;  // means over trials
  double embb_satisfied = 0.0;
  double urllc_satisfied = 0.0;
  double feasible_fraction = 0.0;
};

// Position-redrawn network and channel sequence for one evaluation trial.
struct EvalDraws {
  NetworkInstance net;
  std::vector<ChannelState> channels;
};

inline EvalDraws eval_draws(const NetworkInstance& base, std::uint64_t seed, int trial, int steps) {
  EvalDraws d{base, {}};
  RngStream pos = derive_stream(seed, streams::kEvalPositions, static_cast<std::uint64_t>(trial));
  redraw_positions(d.net, pos);
  RngStream chr = derive_stream(seed, streams::kEvalChannel, static_cast<std::uint64_t>(trial));
  for (int s = 0; s < steps; ++s) d.channels.push_back(sample_channel(d.net, chr));
  return d;
}

// A trained sama-rl policy: scenario, greedy networks and chosen partition.
struct TrainedPolicy {
  Scenario scenario;
  std::vector<neural::Mlp> nets;
  std::size_t arm = 0;
};

inline TrainedPolicy load_trained_policy(const RunConfig& cfg, const std::filesystem::path& model_dir) {
  const auto model_path = model_dir / "model.json";
  ModelFile mf = load_model_file(model_path);
  check_model_shape(mf, cfg, model_path);
  RunConfig shaped = cfg;
  shaped.loop.exp3_mode = mf.encoding;
  TrainedPolicy p;
  p.scenario = scenario_shape(shaped, mf.net);
  p.scenario.norms = mf.norms;
  for (int b = 0; b < p.scenario.num_agents(); ++b) {
    if (p.scenario.norms[b].mean.size() != static_cast<Eigen::Index>(p.scenario.users[b].size()) * mf.net.num_rbs)
      throw ShapeError(model_path.string() + ": normaliser size does not match agent " + std::to_string(b));
    p.nets.push_back(neural::load_checkpoint(checkpoint_path(model_dir, b), p.scenario.layer_sizes(b, cfg.hyper.hidden)));
  }
  if (mf.exp3_weights.size() != p.scenario.controller.size())
    throw ShapeError(model_path.string() + ": EXP3 weight count does not match the controller action space");
  p.arm = static_cast<std::size_t>(std::max_element(mf.exp3_weights.begin(), mf.exp3_weights.end()) -
                                   mf.exp3_weights.begin());
  return p;
}

struct PolicyStep {
  Allocation alloc;
  int infeasible_actions = 0;
};

inline PolicyStep sama_rl_step(const TrainedPolicy& p, const NetworkInstance& net, const ChannelState& ch) {
  const auto& sc = p.scenario;
  const ControllerAssignment& assignment = sc.controller[p.arm];
  std::vector<const neural::AgentActionTable*> tables;
  std::vector<int> rows;
  for (int b = 0; b < sc.num_agents(); ++b) {
    const auto mask = assignment.owned_mask(b);
    const auto state = neural::encode_state(ch, sc.users[b], mask, net.qos, sc.norms[b]);
    tables.push_back(&sc.tables[b]);
    rows.push_back(neural::act_greedy(p.nets[b], state, neural::legal_rows(sc.tables[b], mask)));
  }
  const auto joint = neural::JointAction::from_rows(tables, rows);
  auto outcome = neural::resolve_joint(joint, assignment, net);
  PolicyStep step{std::move(outcome.resolved), 0};
  for (int b = 0; b < sc.num_agents(); ++b)
    if (neural::agent_reward(joint, {step.alloc, outcome.conflicted}, assignment, ch, net, b) < 0.0)
      ++step.infeasible_actions;
  return step;
}

// Evaluates cfg.policy. For sama-rl `model_dir` must hold a trained model;
// the other policies take the topology from it when present and from the
// config's trial-0 topology otherwise. Writes <out>/evaluation.csv when
// `out` is non-empty.
inline EvalSummary evaluate(const RunConfig& cfg, const std::filesystem::path& model_dir,
                            const std::filesystem::path& out = {}) {
  cfg.validate();
  std::optional<TrainedPolicy> trained;
  NetworkInstance net;
  if (cfg.policy == Policy::SamaRl) {
    if (model_dir.empty()) throw ConfigError("evaluating sama-rl needs a trained model directory");
    trained = load_trained_policy(cfg, model_dir);
    net = trained->scenario.net;
  } else if (!model_dir.empty() && std::filesystem::exists(model_dir / "model.json")) {
    ModelFile mf = load_model_file(model_dir / "model.json");
    check_model_shape(mf, cfg, model_dir / "model.json");
    net = mf.net;
  } else {
    net = trial_topology(cfg, 0);
  }
  net.qos = cfg.scenario.qos;
  if (trained) trained->scenario.net.qos = net.qos;
  const ControllerAssignment even = even_partition(net.num_gnbs(), net.num_rbs);

  EvalSummary sum;
  sum.policy = cfg.policy;
  const int S = cfg.loop.steps_per_episode;
  for (int t = 0; t < cfg.loop.eval_trials; ++t) {
    const EvalDraws d = eval_draws(net, cfg.seed, t, S);
    EvalRow row;
    row.trial = t;
    for (const auto& ch : d.channels) {
      PolicyStep step;
      switch (cfg.policy) {
        case Policy::SamaRl: step = sama_rl_step(*trained, d.net, ch); break;
        case Policy::OneSra: step.alloc = one_sra_schedule(d.net, ch, even); break;
        case Policy::Oracle: {
          auto sol = exhaustive_solve_joint(d.net, ch);
          step.alloc = std::move(sol.best_alloc);
          break;
        }
      }
      row.objective_mbps += objective(step.alloc, ch, d.net) / 1e6 / S;
      const auto counts = count_satisfied(step.alloc, ch, d.net);
      row.embb_satisfied += static_cast<double>(counts.embb) / S;
      row.urllc_satisfied += static_cast<double>(counts.urllc) / S;
      if (is_feasible(step.alloc, ch, d.net).feasible()) row.feasible_fraction += 1.0 / S;
      row.infeasible_actions += step.infeasible_actions;
    }
    sum.trials.push_back(row);
    const double n = cfg.loop.eval_trials;
    sum.objective_mbps += row.objective_mbps / n;
    sum.embb_satisfied += row.embb_satisfied / n;
    sum.urllc_satisfied += row.urllc_satisfied / n;
    sum.feasible_fraction += row.feasible_fraction / n;
  }

  if (!out.empty()) {
    std::filesystem::create_directories(out);
    const auto path = out / "evaluation.csv";
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError(path.string() + ": cannot open for writing");
    os << "policy,trial,objective_mbps,embb_satisfied,urllc_satisfied,feasible_fraction,infeasible_actions\n";
    for (const auto& r : sum.trials)
      os << to_string(cfg.policy) << ',' << r.trial << ',' << format_g9(r.objective_mbps) << ','
         << format_g9(r.embb_satisfied) << ',' << format_g9(r.urllc_satisfied) << ','
         << format_g9(r.feasible_fraction) << ',' << r.infeasible_actions << '\n';
    if (!os) throw IoError(path.string() + ": write failed");
  }
  return sum;
}

struct SweepRow {
  std::string param;
  std::string value;
  Policy policy = Policy::SamaRl;
  EvalSummary summary;
};

inline const char* kSweepHeader = "param,value,policy,objective_mbps,embb_satisfied,urllc_satisfied,feasible_fraction";

inline std::string format_sweep_row(const SweepRow& r) {
  return r.param + ',' + r.value + ',' + to_string(r.policy) + ',' + format_g9(r.summary.objective_mbps) + ',' +
         format_g9(r.summary.embb_satisfied) + ',' + format_g9(r.summary.urllc_satisfied) + ',' +
         format_g9(r.summary.feasible_fraction);
}

// One row per (value, policy). sama-rl is retrained for every value under
// <out>/<param>=<value>/; the other policies use that value's trial-0
// topology. Writes <out>/sweep.csv.
inline std::vector<SweepRow> sweep(const RunConfig& base, const std::string& param,
                                   const std::vector<std::string>& values, const std::vector<Policy>& policies,
                                   const std::filesystem::path& out, const TrainOptions& opt = {}) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (policies.empty()) throw ConfigError("sweep needs at least one policy");
  std::filesystem::create_directories(out);
  std::vector<SweepRow> rows;
  for (const auto& v : values) {
    RunConfig cfg = base;
    apply_override(cfg, param, v);
    cfg.validate();
    const auto dir = out / (param + "=" + v);
    for (Policy p : policies) {
      cfg.policy = p;
      std::filesystem::path model;
      if (p == Policy::SamaRl) {
        train(cfg, dir, opt);
        model = agent_dir(dir, 0);
      }
      rows.push_back({param, v, p, evaluate(cfg, model, dir / to_string(p))});
    }
  }
  const auto path = out / "sweep.csv";
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError(path.string() + ": cannot open for writing");
  os << kSweepHeader << '\n';
  for (const auto& r : rows) os << format_sweep_row(r) << '\n';
  if (!os) throw IoError(path.string() + ": write failed");
  return rows;
}

}  // namespace samarl::harness

#endif  // SAMARL_HARNESS_EVALUATE_HPP
