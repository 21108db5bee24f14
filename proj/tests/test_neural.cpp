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

#include "samarl/neural/adam.hpp"
#include "samarl/neural/agent_space.hpp"
#include "samarl/neural/checkpoint.hpp"
#include "samarl/neural/ddqn.hpp"
#include "samarl/neural/mlp.hpp"
#include "samarl/neural/replay.hpp"
#include "samarl/neural/reward.hpp"
#include "test_support.hpp"

namespace samarl::neural {
namespace {

// Plain loops, no Eigen products.
Vector reference_forward(const Mlp& m, const Vector& x) {
  std::vector<double> a(x.data(), x.data() + x.size());
  for (int l = 0; l < m.num_layers(); ++l) {
    std::vector<double> z(m.weight(l).rows());
    for (Eigen::Index i = 0; i < m.weight(l).rows(); ++i) {
      double s = m.bias(l)[i];
      for (Eigen::Index j = 0; j < m.weight(l).cols(); ++j) s += m.weight(l)(i, j) * a[j];
      z[i] = l + 1 < m.num_layers() ? std::max(0.0, s) : s;
    }
    a = z;
  }
  return Eigen::Map<Vector>(a.data(), static_cast<Eigen::Index>(a.size()));
}

double batch_loss(const Mlp& m, const ColMatrix& x, const std::vector<int>& acts, const Vector& y) {
  double l = 0.0;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    const double e = reference_forward(m, x.col(i))[acts[i]] - y[i];
    l += e * e;
  }
  return l / static_cast<double>(x.cols());
}

Vector random_vector(RngStream& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  return v;
}

TEST(Mlp, ZeroAndIdentity) {
  Mlp z({3, 4, 2});
  EXPECT_EQ(z.forward(Vector::Ones(3)), Vector::Zero(2));
  Mlp id({3, 3});
  id.weight(0) = Matrix::Identity(3, 3);
  Vector x(3);
  x << 1.5, -2.0, 0.25;
  EXPECT_EQ(id.forward(x), x);
  EXPECT_THROW(id.forward(Vector::Ones(4)), ShapeError);
}

TEST(Mlp, ForwardMatchesReference) {
  RngStream rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto m = Mlp::random({5, 7, 6, 4}, rng);
    ColMatrix batch(5, 3);
    for (int c = 0; c < 3; ++c) batch.col(c) = random_vector(rng, 5);
    const ColMatrix q = m.forward_batch(batch);
    for (int c = 0; c < 3; ++c) {
      const Vector r = reference_forward(m, batch.col(c));
      EXPECT_LE((m.forward(batch.col(c)) - r).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LE((q.col(c) - r).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(Gradients, LinearHandCheck) {
  Mlp m({1, 1});
  m.weight(0)(0, 0) = 2.0;
  m.bias(0)[0] = 0.5;
  ColMatrix x(1, 1);
  x(0, 0) = 3.0;
  const std::vector<int> acts{0};
  Vector y(1);
  y[0] = 4.0;
  const auto res = gradients(m, x, acts, y);  // pred 6.5
  EXPECT_DOUBLE_EQ(res.loss, 6.25);
  EXPECT_DOUBLE_EQ(res.grads.layers[0].dense_weights(1, 1)(0, 0), 2 * 2.5 * 3.0);
  EXPECT_DOUBLE_EQ(res.grads.layers[0].dense_bias(1)[0], 2 * 2.5);
  y[0] = 6.5;
  const auto zero = gradients(m, x, acts, y);
  EXPECT_EQ(zero.loss, 0.0);
  EXPECT_EQ(zero.grads.layers[0].dense_weights(1, 1)(0, 0), 0.0);
}

TEST(Gradients, MatchFiniteDifferences) {
  RngStream rng(17);
  const double h = 1e-3;
  for (int t = 0; t < 20; ++t) {
    const int in = 2 + static_cast<int>(rng.below(4)), hid = 3 + static_cast<int>(rng.below(4)),
              out = 2 + static_cast<int>(rng.below(4));
    Mlp m = Mlp::random({in, hid, hid, out}, rng);
    const int n = 4;
    ColMatrix x(in, n);
    std::vector<int> acts;
    Vector y(n);
    for (int i = 0; i < n; ++i) {
      x.col(i) = random_vector(rng, in);
      acts.push_back(static_cast<int>(rng.below(out)));
      y[i] = rng.uniform(-1.0, 1.0);
    }
    const auto res = gradients(m, x, acts, y);
    for (int l = 0; l < m.num_layers(); ++l) {
      const Matrix gw = res.grads.layers[l].dense_weights(m.weight(l).rows(), m.weight(l).cols());
      const Vector gb = res.grads.layers[l].dense_bias(m.bias(l).size());
      auto check = [&](double& p, double analytic) {
        const double keep = p;
        p = keep + h;
        const double up = batch_loss(m, x, acts, y);
        p = keep - h;
        const double down = batch_loss(m, x, acts, y);
        p = keep;
        const double fd = (up - down) / (2 * h);
        const double scale = std::max({std::abs(fd), std::abs(analytic), 1e-6});
        EXPECT_LE(std::abs(fd - analytic) / scale, 1e-4) << "layer " << l;
      };
      for (Eigen::Index i = 0; i < gw.rows(); ++i)
        for (Eigen::Index j = 0; j < gw.cols(); ++j) check(m.weight(l)(i, j), gw(i, j));
      for (Eigen::Index i = 0; i < gb.size(); ++i) check(m.bias(l)[i], gb[i]);
    }
  }
}

TEST(Adam, ZeroGradientAndFirstStep) {
  Mlp m({1, 1});
  AdamState st(m);
  Gradients g;
  g.layers.resize(1);
  g.layers[0].weights = Matrix::Zero(1, 1);
  g.layers[0].bias = Vector::Zero(1);
  adam_step(m, g, st);
  EXPECT_EQ(m.weight(0)(0, 0), 0.0);
  EXPECT_EQ(st.step, 1);

  Mlp n({1, 1});
  AdamState s2(n);
  g.layers[0].weights(0, 0) = 0.5;
  adam_step(n, g, s2);
  EXPECT_NEAR(n.weight(0)(0, 0), -0.000999999980, 1e-12);
}

TEST(Adam, TwoStepScalarOracle) {
  Mlp m({1, 1});
  m.weight(0)(0, 0) = 0.3;
  AdamState st(m);
  Gradients g;
  g.layers.resize(1);
  g.layers[0].bias = Vector::Zero(1);
  g.layers[0].weights = Matrix::Constant(1, 1, 0.5);
  adam_step(m, g, st);
  g.layers[0].weights(0, 0) = -0.2;
  adam_step(m, g, st);
  // Scripted by hand: m1 = .05, v1 = .00025; m2 = .025, v2 = .00024975 + .00004
  double th = 0.3, mm = 0.0, vv = 0.0;
  for (int t = 1; t <= 2; ++t) {
    const double gr = t == 1 ? 0.5 : -0.2;
    mm = 0.9 * mm + 0.1 * gr;
    vv = 0.999 * vv + 0.001 * gr * gr;
    th -= 0.001 * (mm / (1 - std::pow(0.9, t))) / (std::sqrt(vv / (1 - std::pow(0.999, t))) + 1e-8);
  }
  EXPECT_NEAR(m.weight(0)(0, 0), th, 1e-12);
}

TEST(Adam, RowSparseEqualsDense) {
  RngStream rng(4);
  Mlp a = Mlp::random({3, 4, 5}, rng);
  Mlp b = a;
  AdamState sa(a), sb(b);
  for (int step = 0; step < 3; ++step) {
    ColMatrix x(3, 2);
    x.col(0) = random_vector(rng, 3);
    x.col(1) = random_vector(rng, 3);
    const std::vector<int> acts{1, 3};
    Vector y = random_vector(rng, 2);
    auto res = gradients(a, x, acts, y);
    Gradients dense = res.grads;
    dense.layers[1].weights = res.grads.layers[1].dense_weights(5, 4);
    dense.layers[1].bias = res.grads.layers[1].dense_bias(5);
    dense.layers[1].rows.clear();
    adam_step(a, res.grads, sa);
    adam_step(b, dense, sb);
  }
  for (int l = 0; l < 2; ++l) {
    EXPECT_LE((a.weight(l) - b.weight(l)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((a.bias(l) - b.bias(l)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Replay, RingOverwritesOldest) {
  ReplayBuffer r(3);
  for (int i = 0; i < 5; ++i) {
    Experience e;
    e.action = i;
    r.push(e);
  }
  EXPECT_EQ(r.size(), 3u);
  const auto c = r.chronological();
  EXPECT_EQ(c[0]->action, 2);
  EXPECT_EQ(c[2]->action, 4);
  RngStream rng(2);
  for (int t = 0; t < 100; ++t) {
    auto s = r.sample(3, rng);
    std::sort(s.begin(), s.end());
    EXPECT_EQ(s, (std::vector<std::size_t>{0, 1, 2}));
  }
  EXPECT_THROW(r.sample(4, rng), ShapeError);
}

TEST(Replay, SampleIsUniform) {
  ReplayBuffer r(10);
  for (int i = 0; i < 10; ++i) r.push({});
  RngStream rng(9);
  std::vector<int> hits(10);
  for (int t = 0; t < 20000; ++t)
    for (auto i : r.sample(3, rng)) ++hits[i];
  for (int h : hits) EXPECT_NEAR(h / 20000.0, 0.3, 0.015);
}

TEST(Epsilon, GreedyBranchesAndArgmax) {
  Mlp m({1, 4});
  m.bias(0) << 0.0, 3.0, 3.0, 1.0;
  RngStream rng(6);
  const Vector s = Vector::Zero(1);
  EXPECT_EQ(epsilon_greedy(m, 0.0, s, {}, rng).action, 1);  // lowest index among ties
  EXPECT_EQ(act_greedy(m, s, {1, 0, 1, 1}), 2);
  std::vector<int> hist(4);
  for (int i = 0; i < 40000; ++i) ++hist[epsilon_greedy(m, 1.0, s, {}, rng).action];
  for (int h : hist) EXPECT_NEAR(h / 40000.0, 0.25, 0.01);
  int explored = 0;
  for (int i = 0; i < 100000; ++i) explored += epsilon_greedy(m, 0.5, s, {}, rng).explored;
  EXPECT_NEAR(explored / 1e5, 0.5, 0.01);
  // Masked exploration never leaves the mask.
  for (int i = 0; i < 1000; ++i) EXPECT_NE(epsilon_greedy(m, 1.0, s, {1, 0, 1, 1}, rng).action, 1);
}

TEST(Epsilon, ArgmaxInvariantUnderShift) {
  RngStream rng(12);
  const auto m = Mlp::random({3, 8, 6}, rng);
  Mlp shifted = m;
  shifted.bias(1).array() += 5.0;
  for (int i = 0; i < 50; ++i) {
    const Vector s = random_vector(rng, 3);
    EXPECT_EQ(act_greedy(m, s), act_greedy(shifted, s));
  }
}

DdqnAgent small_agent(int state, int actions, DdqnConfig cfg, std::uint64_t seed = 1) {
  AgentActionTable t(1, {0});
  for (int a = 0; a < actions; ++a) t.append(std::vector<std::int8_t>{static_cast<std::int8_t>(a == 0 ? -1 : 0)});
  RngStream init(seed);
  return DdqnAgent(0, std::move(t), state, cfg, init);
}

TEST(Ddqn, EpsilonTrajectoryAndTargetSync) {
  DdqnConfig cfg;
  cfg.hidden = {4};
  cfg.batch_size = 2;
  cfg.target_update_interval = 5;
  auto agent = small_agent(2, 2, cfg);
  RngStream rng(3);
  for (int i = 0; i < 4; ++i) agent.replay().push({Vector::Ones(2), i % 2, 1.0, Vector::Zero(2), 0});
  const Mlp initial_target = agent.target();
  for (int step = 1; step <= 12; ++step) {
    ASSERT_TRUE(train_step(agent, rng).has_value());
    EXPECT_NEAR(agent.epsilon(), std::pow(0.9995, step), 1e-12);
    if (step < 5) {
      EXPECT_TRUE(agent.target() == initial_target);
    }
    EXPECT_EQ(agent.target() == agent.main(), step % 5 == 0);
  }
  agent.set_epsilon(0.0);
  EXPECT_EQ(agent.epsilon(), cfg.epsilon_min);
}

TEST(Ddqn, EpsilonFloor) {
  DdqnConfig cfg;
  cfg.hidden = {2};
  cfg.batch_size = 1;
  auto agent = small_agent(1, 2, cfg);
  agent.replay().push({Vector::Ones(1), 0, 0.0, Vector::Ones(1), 0});
  RngStream rng(4);
  for (int i = 0; i < 12000; ++i) train_step(agent, rng);
  EXPECT_EQ(agent.epsilon(), 0.01);
}

TEST(Ddqn, ComputeTargets) {
  RngStream rng(8);
  const auto main = Mlp::random({3, 5, 4}, rng);
  const auto target = Mlp::random({3, 5, 4}, rng);
  std::vector<Experience> store;
  for (int i = 0; i < 6; ++i)
    store.push_back({random_vector(rng, 3), static_cast<int>(rng.below(4)), rng.uniform(-1, 5), random_vector(rng, 3), 0});
  std::vector<const Experience*> batch;
  for (const auto& e : store) batch.push_back(&e);
  const Vector y0 = compute_targets(batch, main, target, 0.0);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(y0[i], store[i].reward);
  const Vector y = compute_targets(batch, main, target, 0.9);
  const Vector same = compute_targets(batch, main, main, 0.9);
  for (int i = 0; i < 6; ++i) {
    const Vector qm = reference_forward(main, store[i].next_state);
    Eigen::Index a;
    qm.maxCoeff(&a);
    const double expect = store[i].reward + 0.9 * reference_forward(target, store[i].next_state)[a];
    EXPECT_NEAR(y[i], expect, 1e-12);
    EXPECT_NEAR(same[i], store[i].reward + 0.9 * qm.maxCoeff(), 1e-12);
  }
}

TEST(Ddqn, TrainStepNeedsFullBatch) {
  DdqnConfig cfg;
  cfg.hidden = {8};
  auto agent = small_agent(2, 3, cfg);
  for (int i = 0; i < 63; ++i) agent.replay().push({Vector::Ones(2), 1, 1.0, Vector::Ones(2), 0});
  const Mlp before = agent.main();
  RngStream rng(1);
  EXPECT_FALSE(train_step(agent, rng).has_value());
  EXPECT_TRUE(agent.main() == before);
  EXPECT_EQ(agent.epsilon(), 1.0);
}

TEST(Ddqn, SingleTransitionConverges) {
  DdqnConfig cfg;
  cfg.hidden = {16, 16};
  cfg.batch_size = 1;
  cfg.gamma = 0.0;
  auto agent = small_agent(3, 4, cfg);
  Vector s(3);
  s << 0.5, -1.0, 2.0;
  agent.replay().push({s, 2, 1.7, s, 0});
  RngStream rng(2);
  double loss = 1.0;
  for (int i = 0; i < 5000; ++i) loss = *train_step(agent, rng);
  EXPECT_LT(loss, 1e-6);
}

// Rows of an independent enumeration over (U+1)^K maps meeting the cap and
// the borrowing gate.
std::size_t count_rows(int K, int U, int k_max, std::uint64_t owned) {
  std::size_t count = 0;
  std::size_t total = 1;
  for (int k = 0; k < K; ++k) total *= static_cast<std::size_t>(U + 1);
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<int> per(U, 0);
    int owned_n = 0, used = 0;
    bool borrows = false;
    std::size_t c = code;
    for (int k = 0; k < K; ++k) {
      const int h = static_cast<int>(c % (U + 1)) - 1;
      c /= U + 1;
      const bool mine = owned >> k & 1;
      owned_n += mine;
      if (h < 0) continue;
      ++per[h];
      mine ? ++used : borrows = true;
    }
    bool ok = !borrows || used == owned_n;
    for (int p : per) ok = ok && p <= k_max;
    count += ok;
  }
  return count;
}

TEST(ActionTable, SmallExamples) {
  const auto one = enumerate_agent_actions(1, {7}, 0b1, 1);
  ASSERT_EQ(one.size(), 2u);
  EXPECT_EQ(one.holder(0, 0), -1);
  EXPECT_EQ(one.holder(1, 0), 7);
  const auto two = enumerate_agent_actions(2, {0}, 0b01, 2);
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < two.size(); ++i) rows.push_back({two.holder(i, 0), two.holder(i, 1)});
  EXPECT_NE(std::find(rows.begin(), rows.end(), std::vector<int>{0, 0}), rows.end());
  EXPECT_EQ(std::find(rows.begin(), rows.end(), std::vector<int>{-1, 0}), rows.end());
  EXPECT_EQ(rows.size(), 3u);
}

TEST(ActionTable, CountsMatchIndependentEnumeration) {
  EXPECT_EQ(enumerate_structural_actions(6, {0, 1, 2, 3}, 3).size(), 14565u);
  for (int U = 1; U <= 4; ++U)
    EXPECT_EQ(enumerate_structural_actions(6, std::vector<int>(U, 0), 3).size(), count_rows(6, U, 3, 0x3f));
  for (std::uint64_t owned : {0b000111ULL, 0b101010ULL, 0ULL, 0b111111ULL}) {
    const auto t = enumerate_agent_actions(6, {0, 1, 2}, owned, 2);
    EXPECT_EQ(t.size(), count_rows(6, 3, 2, owned));
    const auto structural = enumerate_structural_actions(6, {0, 1, 2}, 2);
    const auto mask = legal_rows(structural, owned);
    EXPECT_EQ(static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1)), t.size());
  }
}

TEST(ActionTable, RowsPassStructuralChecks) {
  auto net = testing::tiny_net(2, {{SliceKind::Embb, 0}, {SliceKind::Urllc, 0}, {SliceKind::Embb, 1}}, 4, 2);
  ControllerAssignment a;
  a.owner = {0, 1, 0, 1};
  const auto t = enumerate_agent_actions(4, net.users_of(0), 0b0101, 2);
  EXPECT_THROW(enumerate_agent_actions(6, {0, 1, 2, 3}, 0x3f, 3, 1000), SizeError);
  for (std::size_t i = 0; i < t.size(); ++i) {
    Allocation alloc = Allocation::empty(net, a);
    apply_row(t, i, alloc.x);
    EXPECT_TRUE(check_fairness(alloc, net.k_max));
    EXPECT_TRUE(check_ofdma(alloc));
    EXPECT_TRUE(check_borrowing_of(alloc, net, 0));
  }
}

TEST(State, EncodingLayout) {
  const auto net = testing::tiny_net(2, {{SliceKind::Embb, 0}, {SliceKind::Embb, 0}, {SliceKind::Urllc, 0},
                                         {SliceKind::Urllc, 0}, {SliceKind::Embb, 1}},
                                     6, 3);
  const ChannelState ch(5, 6);
  const auto users = net.users_of(0);
  const auto norm = StateNormalizer::identity(24);
  const Vector s = encode_state(ch, users, 0b000111, net.qos, norm);
  ASSERT_EQ(s.size(), 32);
  EXPECT_EQ(encoded_state_size(4, 6), 32u);
  for (int i = 0; i < 24; ++i) EXPECT_DOUBLE_EQ(s[i], -20.0);
  for (int k = 0; k < 6; ++k) EXPECT_EQ(s[24 + k], k < 3 ? 1.0 : 0.0);
  EXPECT_DOUBLE_EQ(s[30], net.qos.r_min_bps / 1e6);
  EXPECT_DOUBLE_EQ(s[31], net.qos.d_max_s * 1e3);
  EXPECT_EQ(s, encode_state(ch, users, 0b000111, net.qos, norm));
  EXPECT_THROW(encode_state(ch, users, 0, net.qos, StateNormalizer::identity(5)), ShapeError);
}

TEST(State, NormalizerFit) {
  ColMatrix samples(2, 4);
  samples << 1, 2, 3, 4, 5, 5, 5, 5;
  const auto n = StateNormalizer::fit(samples);
  EXPECT_DOUBLE_EQ(n.mean[0], 2.5);
  EXPECT_NEAR(n.stddev[0], std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(n.stddev[1], 1.0);
}

struct TwoAgentFixture {
  NetworkInstance net = testing::tiny_net(
      2, {{SliceKind::Embb, 0}, {SliceKind::Urllc, 0}, {SliceKind::Embb, 1}, {SliceKind::Urllc, 1}}, 4, 2);
  ControllerAssignment part;
  ChannelState ch{4, 4};
  TwoAgentFixture() {
    part.owner = {0, 0, 1, 1};
    ch.gains.assign(16, 1e-10);
  }
  JointAction joint(std::vector<int> a, std::vector<int> b) const { return {{std::move(a), std::move(b)}}; }
};

TEST(Reward, InfeasibleCases) {
  TwoAgentFixture f;
  // Nothing used: QoS fails for everyone.
  EXPECT_EQ(agent_reward(f.joint({-1, -1, -1, -1}, {-1, -1, -1, -1}), f.part, f.ch, f.net, 0), -1.0);
  // Agent 0 borrows RB 2, which agent 1 uses itself: the borrower loses,
  // the owner keeps it.
  const auto j = f.joint({0, 1, 0, -1}, {-1, -1, 2, 3});
  const auto out = resolve_joint(j, f.part, f.net);
  EXPECT_TRUE(out.conflicted[0]);
  EXPECT_FALSE(out.conflicted[1]);
  EXPECT_EQ(agent_reward(j, out, f.part, f.ch, f.net, 0), -1.0);
  EXPECT_GT(agent_reward(j, out, f.part, f.ch, f.net, 1), 0.0);
  EXPECT_EQ(out.resolved.x.at(2, 2), 1);
  EXPECT_EQ(out.resolved.x.at(0, 2), 0);
}

TEST(Reward, TwoBorrowersOfOneRb) {
  auto net = testing::tiny_net(3, {{SliceKind::Embb, 0}, {SliceKind::Embb, 1}, {SliceKind::Embb, 2}}, 3, 2,
                               {1e3, 1.0});
  ControllerAssignment part;
  part.owner = {0, 1, 2};
  ChannelState ch(3, 3);
  ch.gains.assign(9, 1e-10);
  JointAction j{{{0, -1, -1}, {-1, 1, -1}, {-1, -1, -1}}};
  // Agents 0 and 1 both borrow RB 2, which its owner leaves empty.
  j.holders[0][2] = 0;
  j.holders[1][2] = 1;
  const auto out = resolve_joint(j, part, net);
  EXPECT_TRUE(out.conflicted[0]);
  EXPECT_TRUE(out.conflicted[1]);
  EXPECT_EQ(agent_reward(j, out, part, ch, net, 0), -1.0);
  EXPECT_EQ(agent_reward(j, out, part, ch, net, 1), -1.0);
  EXPECT_EQ(out.resolved.x.at(0, 2) + out.resolved.x.at(1, 2), 0);
}

TEST(Reward, FeasibleEqualsRestrictedObjective) {
  TwoAgentFixture f;
  const auto j = f.joint({0, 1, -1, -1}, {-1, -1, 2, 3});
  const auto out = resolve_joint(j, f.part, f.net);
  ASSERT_TRUE(is_feasible(out.resolved, f.ch, f.net).feasible());
  for (int b = 0; b < 2; ++b) {
    double expect = 0.0;
    for (int u : f.net.users_of(b)) expect += user_total_rate(out.resolved.x, f.ch, u, f.net.phys);
    EXPECT_NEAR(agent_reward(j, out, f.part, f.ch, f.net, b), expect / 1e6, 1e-12);
  }
  EXPECT_NEAR((agent_reward(j, out, f.part, f.ch, f.net, 0) + agent_reward(j, out, f.part, f.ch, f.net, 1)) * 1e6,
              objective(out.resolved, f.ch, f.net), 1e-3);
}

TEST(Reward, SoleBorrowerKeepsRb) {
  TwoAgentFixture f;
  auto part = f.part;
  part.owner = {0, 1, 1, 1};
  // Agent 0 uses its only RB and borrows RB 1, which agent 1 leaves free.
  const auto j = f.joint({0, 1, -1, -1}, {-1, -1, 2, 3});
  const auto out = resolve_joint(j, part, f.net);
  EXPECT_FALSE(out.conflicted[0]);
  EXPECT_EQ(out.resolved.x.at(1, 1), 1);
  EXPECT_GT(agent_reward(j, out, part, f.ch, f.net, 0), 0.0);
}

TEST(Checkpoint, RoundTripAndShapeGuard) {
  RngStream rng(5);
  const auto m = Mlp::random({4, 6, 3}, rng);
  const auto path = std::filesystem::temp_directory_path() / "samarl_test_ckpt" / "0.bin";
  save_checkpoint(path, m);
  EXPECT_TRUE(load_checkpoint(path) == m);
  EXPECT_TRUE(load_checkpoint(path, {4, 6, 3}) == m);
  EXPECT_THROW(load_checkpoint(path, {4, 7, 3}), ShapeError);
  EXPECT_THROW(load_checkpoint(path.parent_path() / "missing.bin"), IoError);
  std::filesystem::remove_all(path.parent_path());
}

}  // namespace
}  // namespace samarl::neural
