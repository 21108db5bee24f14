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

// samarl train|evaluate|sweep|oracle

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "samarl/samarl.hpp"

namespace fs = std::filesystem;
using namespace samarl;
using namespace samarl::harness;

namespace {

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config, "INI config file ([scenario], [hyper], [loop])");
  cmd->add_option("--seed", a.seed, "root seed (overrides loop.seed)");
  cmd->add_option("--set", a.sets, "override, section.key=value (repeatable)");
}

RunConfig resolve(const CommonArgs& a) {
  RunConfig cfg = a.config.empty() ? RunConfig{} : load_config(a.config);
  for (const auto& s : a.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    apply_override(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (a.seed) cfg.seed = *a.seed;
  cfg.validate();
  return cfg;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void print_summary(const EvalSummary& s) {
  std::printf("policy=%s objective_mbps=%.6f embb_satisfied=%.4f urllc_satisfied=%.4f feasible_fraction=%.4f\n",
              to_string(s.policy), s.objective_mbps, s.embb_satisfied, s.urllc_satisfied, s.feasible_fraction);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two time-scale RAN slicing: EXP3 controller over DDQN gNodeB agents"};
  app.require_subcommand(1);

  CommonArgs train_args;
  std::string train_out;
  bool verbose = false;
  auto* train_cmd = app.add_subcommand("train", "train agents and controller, write metrics and checkpoints");
  add_common(train_cmd, train_args);
  train_cmd->add_option("--out", train_out, "output directory")->required();
  train_cmd->add_flag("--verbose", verbose, "progress on stderr every 100 episodes");

  CommonArgs eval_args;
  std::string eval_out, eval_model, eval_policy;
  auto* eval_cmd = app.add_subcommand("evaluate", "roll out a policy and report objective and QoS counts");
  add_common(eval_cmd, eval_args);
  eval_cmd->add_option("--model", eval_model, "trained model directory (e.g. <train-out>/agents)");
  eval_cmd->add_option("--policy", eval_policy, "sama-rl | 1sra | oracle");
  eval_cmd->add_option("--out", eval_out, "directory for evaluation.csv");

  CommonArgs sweep_args;
  std::string sweep_out, sweep_param, sweep_values, sweep_policy = "sama-rl,1sra";
  bool sweep_verbose = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate policies across values of one parameter");
  add_common(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--out", sweep_out, "output directory")->required();
  sweep_cmd->add_option("--param", sweep_param, "section.key or users")->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required();
  sweep_cmd->add_option("--policy", sweep_policy, "comma-separated policies")->capture_default_str();
  sweep_cmd->add_flag("--verbose", sweep_verbose, "training progress on stderr");

  CommonArgs oracle_args;
  std::string oracle_out;
  auto* oracle_cmd = app.add_subcommand("oracle", "exhaustive joint optimum on one channel draw");
  add_common(oracle_cmd, oracle_args);
  oracle_cmd->add_option("--out", oracle_out, "directory for oracle.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*train_cmd) {
      const RunConfig cfg = resolve(train_args);
      TrainOptions opt;
      opt.quiet = !verbose;
      const auto res = train(cfg, train_out, opt);
      std::printf("trained %zu episodes (%zu steps); outputs in %s\n", res.episodes.size(), res.steps.size(),
                  train_out.c_str());
    } else if (*eval_cmd) {
      RunConfig cfg = resolve(eval_args);
      if (!eval_policy.empty()) cfg.policy = parse_policy(eval_policy);
      print_summary(evaluate(cfg, eval_model, eval_out));
    } else if (*sweep_cmd) {
      const RunConfig cfg = resolve(sweep_args);
      std::vector<Policy> policies;
      for (const auto& p : split_list(sweep_policy)) policies.push_back(parse_policy(p));
      TrainOptions opt;
      opt.quiet = !sweep_verbose;
      const auto rows = sweep(cfg, sweep_param, split_list(sweep_values), policies, sweep_out, opt);
      std::cout << kSweepHeader << '\n';
      for (const auto& r : rows) std::cout << format_sweep_row(r) << '\n';
    } else if (*oracle_cmd) {
      const RunConfig cfg = resolve(oracle_args);
      const EvalDraws d = eval_draws(trial_topology(cfg, 0), cfg.seed, 0, 1);
      const auto sol = exhaustive_solve_joint(d.net, d.channels[0]);
      std::ostringstream os;
      os << "# feasible " << (sol.feasible ? 1 : 0) << "\n# objective_mbps " << format_g9(sol.best_value / 1e6)
         << "\n# explored " << sol.explored << "\n# owners";
      for (int o : sol.best_alloc.assignment.owner) os << ' ' << o;
      os << "\n# user rb\n" << to_text(sol.best_alloc.x);
      std::cout << os.str();
      if (!oracle_out.empty()) {
        fs::create_directories(oracle_out);
        std::ofstream f(fs::path(oracle_out) / "oracle.txt", std::ios::binary | std::ios::trunc);
        if (!f) throw IoError(oracle_out + "/oracle.txt: cannot open for writing");
        f << os.str();
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "samarl: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
