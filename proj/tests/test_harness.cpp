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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "samarl/harness/config.hpp"
#include "samarl/harness/evaluate.hpp"
#include "samarl/harness/metrics.hpp"
#include "samarl/harness/train.hpp"
#include "test_support.hpp"

namespace samarl::harness {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("samarl_harness_" + name);
  fs::remove_all(p);
  return p;
}

// Small enough for the unit suite: 2 gNodeBs, 3 users, 3 RBs.
RunConfig small_config() {
  RunConfig cfg;
  cfg.scenario.num_embb = 2;
  cfg.scenario.num_urllc = 1;
  cfg.scenario.num_rbs = 3;
  cfg.scenario.k_max = 2;
  cfg.hyper.hidden = {16};
  cfg.hyper.batch_size = 8;
  cfg.hyper.target_update_interval = 20;
  cfg.loop.episodes = 12;
  cfg.loop.steps_per_episode = 4;
  cfg.loop.reposition_every = 5;
  cfg.loop.checkpoint_every = 5;
  cfg.loop.eval_trials = 3;
  cfg.loop.normalizer_draws = 50;
  cfg.seed = 7;
  return cfg;
}

TEST(Config, ParsesAllSections) {
  std::istringstream is(
      "[scenario]\nrbs = 4\nembb_users = 1\nurllc_users = 2\nr_min_bps = 2e5\n"
      "[hyper]\nhidden = 32,16\ngamma = 0.5\n[loop]\nepisodes = 10\nseed = 99\npolicy = 1sra\n");
  const auto cfg = parse_config(is);
  EXPECT_EQ(cfg.scenario.num_rbs, 4);
  EXPECT_EQ(cfg.scenario.num_urllc, 2);
  EXPECT_EQ(cfg.scenario.qos.r_min_bps, 2e5);
  EXPECT_EQ(cfg.hyper.hidden, (std::vector<int>{32, 16}));
  EXPECT_EQ(cfg.hyper.gamma, 0.5);
  EXPECT_EQ(cfg.loop.episodes, 10);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_EQ(cfg.policy, Policy::OneSra);
}

TEST(Config, Defaults) {
  const RunConfig cfg;
  EXPECT_EQ(cfg.scenario.num_gnbs, 2);
  EXPECT_EQ(cfg.scenario.num_embb + cfg.scenario.num_urllc, 8);
  EXPECT_EQ(cfg.scenario.num_rbs, 6);
  EXPECT_EQ(cfg.scenario.k_max, 3);
  EXPECT_EQ(cfg.hyper.hidden, (std::vector<int>{256, 256}));
  EXPECT_EQ(cfg.hyper.gamma, 0.996);
  EXPECT_EQ(cfg.hyper.batch_size, 64u);
  EXPECT_EQ(cfg.loop.episodes, 3000);
}

TEST(Config, ShippedFilesParse) {
  const fs::path dir = SAMARL_CONFIG_DIR;
  const auto desk = load_config(dir / "desk.ini");
  const RunConfig def;
  EXPECT_EQ(desk.scenario.num_embb, def.scenario.num_embb);
  EXPECT_EQ(desk.scenario.num_rbs, def.scenario.num_rbs);
  EXPECT_EQ(desk.scenario.qos.r_min_bps, def.scenario.qos.r_min_bps);
  EXPECT_EQ(desk.hyper.gamma, def.hyper.gamma);
  EXPECT_EQ(desk.loop.steps_per_episode, def.loop.steps_per_episode);
  EXPECT_EQ(desk.seed, def.seed);
  const auto tiny = load_config(dir / "tiny.ini");
  EXPECT_EQ(tiny.scenario.num_rbs, 4);
  EXPECT_EQ(tiny.scenario.num_embb + tiny.scenario.num_urllc, 4);
}

TEST(Config, Errors) {
  std::istringstream unknown_key("[scenario]\nbogus = 1\n");
  EXPECT_THROW(parse_config(unknown_key), ConfigError);
  std::istringstream unknown_section("[other]\nx = 1\n");
  EXPECT_THROW(parse_config(unknown_section), ConfigError);
  std::istringstream bad_number("[scenario]\nrbs = four\n");
  EXPECT_THROW(parse_config(bad_number), ConfigError);
  std::istringstream bad_policy("[loop]\npolicy = greedy\n");
  EXPECT_THROW(parse_config(bad_policy), ConfigError);
  std::istringstream zero_rbs("[scenario]\nrbs = 0\n");
  EXPECT_THROW(parse_config(zero_rbs), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/samarl.ini"), IoError);
  RunConfig cfg;
  apply_override(cfg, "users", "5");
  EXPECT_EQ(cfg.scenario.num_embb, 3);
  EXPECT_EQ(cfg.scenario.num_urllc, 2);
}

TEST(Metrics, HeaderOnlyAndRoundTrip) {
  std::ostringstream empty;
  write_metrics(empty, {});
  EXPECT_EQ(empty.str(), metrics_header() + "\n");
  EXPECT_EQ(split_csv_line(metrics_header()).size(), 11u);

  MetricsRecord a{0, 1, 2, 0.5, -1.0, std::nan(""), 12.3456789012, 3, 4, 5, 1};
  MetricsRecord b{1, 0, 0, 1.0 / 3.0, 2.5, 0.25, 0.0, 0, 0, 0, 0};
  std::ostringstream os;
  write_metrics(os, {a, b});
  const std::string text = os.str();
  EXPECT_EQ(text.back(), '\n');
  std::istringstream is(text);
  const auto back = parse_metrics(is);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_TRUE(std::isnan(back[0].mean_loss));
  EXPECT_EQ(back[0].objective_mbps, 12.3456789);  // 9 significant digits
  EXPECT_EQ(back[1].epsilon, 0.333333333);
  EXPECT_EQ(format_record(back[0]), format_record(a));
  std::istringstream bad("trial,episode\n1,2\n");
  EXPECT_THROW(parse_metrics(bad), IoError);
}

TEST(Train, OneEpisodeOneStepAccounting) {
  auto cfg = small_config();
  cfg.loop.episodes = 1;
  cfg.loop.steps_per_episode = 1;
  cfg.loop.trials = 2;
  const auto out = scratch("accounting");
  const auto res = train(cfg, out);
  ASSERT_EQ(res.steps.size(), 2u);
  EXPECT_EQ(res.steps[0].trial, 0);
  EXPECT_EQ(res.steps[1].trial, 1);
  EXPECT_EQ(res.steps[0].epsilon, 1.0);
  EXPECT_TRUE(std::isnan(res.steps[0].mean_loss));  // buffer below one batch
  const auto rows = load_metrics(out / "metrics.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(format_record(rows[0]), format_record(res.steps[0]));
  EXPECT_TRUE(fs::exists(checkpoint_path(agent_dir(out, 0), 0)));
  EXPECT_TRUE(fs::exists(checkpoint_path(agent_dir(out, 0), 1)));
  EXPECT_TRUE(fs::exists(checkpoint_path(agent_dir(out, 1), 1)));
  EXPECT_TRUE(fs::exists(agent_dir(out, 0) / "model.json"));
  EXPECT_TRUE(fs::exists(out / "episodes.csv"));
  EXPECT_TRUE(fs::exists(out / "exp3_weights.csv"));
  fs::remove_all(out);
}

TEST(Train, Deterministic) {
  const auto cfg = small_config();
  const auto a = scratch("det_a"), b = scratch("det_b");
  train(cfg, a);
  train(cfg, b);
  for (const char* f : {"metrics.csv", "episodes.csv", "exp3_weights.csv", "agents/0.bin", "agents/1.bin",
                        "agents/model.json", "agents/snapshots/ep00005/0.bin"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  auto other = cfg;
  other.seed = 8;
  const auto c = scratch("det_c");
  train(other, c);
  EXPECT_NE(slurp(a / "metrics.csv"), slurp(c / "metrics.csv"));
  for (const auto& p : {a, b, c}) fs::remove_all(p);
}

TEST(Train, CountersMatchRecomputation) {
  auto cfg = small_config();
  const auto out = scratch("counters");
  TrainOptions opt;
  int calls = 0;
  opt.observer = [&](const MetricsRecord& r, const Allocation& alloc, const ChannelState& ch,
                     const NetworkInstance& net) {
    ++calls;
    int embb = 0, urllc = 0;
    for (const auto& u : net.users) {
      const double rate = user_total_rate(alloc.x, ch, u.id, net.phys);
      if (u.slice == SliceKind::Embb) {
        embb += rate >= net.qos.r_min_bps;
      } else {
        const auto d = packet_delay(rate, u.packet_len_bits, u.arrival_rate_pps);
        urllc += d && *d <= net.qos.d_max_s;
      }
    }
    EXPECT_EQ(r.embb_satisfied, embb);
    EXPECT_EQ(r.urllc_satisfied, urllc);
    EXPECT_LE(r.embb_satisfied, cfg.scenario.num_embb);
    EXPECT_LE(r.urllc_satisfied, cfg.scenario.num_urllc);
    EXPECT_NEAR(r.objective_mbps, objective(alloc, ch, net) / 1e6, 1e-9);
    EXPECT_TRUE(check_ofdma(alloc));
  };
  const auto res = train(cfg, out, opt);
  EXPECT_EQ(calls, cfg.loop.episodes * cfg.loop.steps_per_episode);
  EXPECT_EQ(res.episodes.size(), static_cast<std::size_t>(cfg.loop.episodes));
  fs::remove_all(out);
}

TEST(Evaluate, DeterministicAndShapeChecked) {
  auto cfg = small_config();
  const auto out = scratch("eval");
  train(cfg, out);
  const auto model = agent_dir(out, 0);
  const auto s1 = evaluate(cfg, model, out / "e1");
  const auto s2 = evaluate(cfg, model, out / "e2");
  EXPECT_EQ(slurp(out / "e1" / "evaluation.csv"), slurp(out / "e2" / "evaluation.csv"));
  EXPECT_EQ(s1.objective_mbps, s2.objective_mbps);
  EXPECT_EQ(s1.trials.size(), 3u);
  auto wrong = cfg;
  wrong.scenario.num_rbs = 4;
  EXPECT_THROW(evaluate(wrong, model), ShapeError);
  fs::remove_all(out);
}

TEST(Evaluate, OraclePolicyEqualsExhaustiveJoint) {
  auto cfg = small_config();
  cfg.policy = Policy::Oracle;
  cfg.loop.steps_per_episode = 2;
  const auto sum = evaluate(cfg, {});
  const auto net = trial_topology(cfg, 0);
  double expect = 0.0;
  for (int t = 0; t < cfg.loop.eval_trials; ++t) {
    const auto d = eval_draws(net, cfg.seed, t, 2);
    double row = 0.0;
    for (const auto& ch : d.channels) row += exhaustive_solve_joint(d.net, ch).best_value / 1e6 / 2;
    EXPECT_NEAR(sum.trials[t].objective_mbps, row, 1e-9);
    expect += row / cfg.loop.eval_trials;
  }
  EXPECT_NEAR(sum.objective_mbps, expect, 1e-9);
}

TEST(Sweep, RowsPerPolicyAndSingleValue) {
  auto cfg = small_config();
  cfg.loop.episodes = 3;
  const auto out = scratch("sweep");
  const auto rows = sweep(cfg, "users", {"2", "3", "4"}, {Policy::SamaRl, Policy::OneSra}, out);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.policy == Policy::OneSra; }), 3);
  std::ifstream csv(out / "sweep.csv");
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  EXPECT_EQ(lines, 7);

  // One value: identical to a direct evaluate on the overridden config.
  const auto single = sweep(cfg, "scenario.r_min_bps", {"50000"}, {Policy::OneSra}, out / "single");
  auto direct = cfg;
  direct.scenario.qos.r_min_bps = 50000;
  direct.policy = Policy::OneSra;
  const auto sum = evaluate(direct, {});
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].summary.objective_mbps, sum.objective_mbps);
  EXPECT_EQ(single[0].summary.feasible_fraction, sum.feasible_fraction);
  fs::remove_all(out);
}

}  // namespace
}  // namespace samarl::harness
