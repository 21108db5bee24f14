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

#ifndef SAMARL_EXP3_HPP
#define SAMARL_EXP3_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "samarl/allocation.hpp"
#include "samarl/errors.hpp"
#include "samarl/random.hpp"

namespace samarl {

enum class ActionEncoding { Full, Coarse };

struct ControllerActionSpace {
  std::vector<ControllerAssignment> actions;
  ActionEncoding encoding = ActionEncoding::Full;

  std::size_t size() const { return actions.size(); }
  const ControllerAssignment& operator[](std::size_t i) const { return actions[i]; }
};

inline constexpr std::size_t kMaxFullControllerActions = 4096;

namespace detail {

inline void enumerate_splits(int gnbs, int remaining, std::vector<int>& cur,
                             std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == gnbs - 1) {
    cur.push_back(remaining);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int n = 0; n <= remaining; ++n) {
    cur.push_back(n);
    enumerate_splits(gnbs, remaining - n, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

// Full: all B^K owner vectors, lexicographic. Coarse: one contiguous block
// per gNodeB for every split (n_1..n_B) with sum K, splits lexicographic.
inline ControllerActionSpace enumerate_controller_actions(int num_gnbs, int num_rbs,
                                                          ActionEncoding mode) {
  if (num_gnbs < 1 || num_rbs < 1) throw ConfigError("controller needs B >= 1 and K >= 1");
  ControllerActionSpace space;
  space.encoding = mode;
  if (mode == ActionEncoding::Full) {
    if (std::pow(static_cast<double>(num_gnbs), num_rbs) >
        static_cast<double>(kMaxFullControllerActions))
      throw SizeError("full controller action space B^K exceeds 4096; use coarse encoding");
    space.actions = all_partitions(num_gnbs, num_rbs);
    return space;
  }
  std::vector<std::vector<int>> splits;
  std::vector<int> cur;
  detail::enumerate_splits(num_gnbs, num_rbs, cur, splits);
  for (const auto& s : splits) {
    ControllerAssignment a;
    for (int b = 0; b < num_gnbs; ++b) a.owner.insert(a.owner.end(), s[b], b);
    space.actions.push_back(std::move(a));
  }
  return space;
}

// Full when it fits under the bound, coarse otherwise.
inline ActionEncoding auto_encoding(int num_gnbs, int num_rbs) {
  return std::pow(static_cast<double>(num_gnbs), num_rbs) <=
                 static_cast<double>(kMaxFullControllerActions)
             ? ActionEncoding::Full
             : ActionEncoding::Coarse;
}

// 1 - 1/(1+r), r >= 0.
inline double scale_reward(double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("controller reward must be >= 0");
  return 1.0 - 1.0 / (1.0 + r);
}

// Importance-weighted estimate for the chosen arm.
inline double estimated_reward(double scaled, double pi) { return scaled / pi; }

inline constexpr double kExp3RenormThreshold = 1e100;

class Exp3 {
 public:
  Exp3(std::size_t num_actions, double alpha) : weights_(num_actions, 1.0), alpha_(alpha) {
    if (num_actions == 0) throw ConfigError("EXP3 needs at least one action");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("EXP3 alpha must lie in [0, 1]");
  }

  std::size_t num_actions() const { return weights_.size(); }
  double alpha() const { return alpha_; }
  std::uint64_t round() const { return round_; }
  const std::vector<double>& weights() const { return weights_; }

  // Test hook; weights must be positive and finite.
  void set_weights(std::vector<double> w) {
    if (w.size() != weights_.size()) throw ShapeError("EXP3 weight count mismatch");
    for (double x : w)
      if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("EXP3 weights must be > 0");
    weights_ = std::move(w);
  }

  // pi_i = (1 - alpha) psi_i / sum psi + alpha / |A|
  std::vector<double> probabilities() const {
    const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    const double n = static_cast<double>(weights_.size());
    std::vector<double> p(weights_.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      p[i] = (1.0 - alpha_) * weights_[i] / total + alpha_ / n;
    return p;
  }

  std::size_t select(RngStream& rng) const { return sample_index(probabilities(), rng); }

  // Inverse-CDF draw; zero-probability entries are never returned.
  static std::size_t sample_index(const std::vector<double>& p, RngStream& rng) {
    const double u = rng.uniform();
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] <= 0.0) continue;
      last_positive = i;
      cum += p[i];
      if (u < cum) return i;
    }
    return last_positive;
  }

  // Raw reward r >= 0 (Mbps); scaled, importance-weighted, then applied to
  // the chosen arm only.
  void update(std::size_t chosen, double raw_reward) {
    if (chosen >= weights_.size()) throw std::out_of_range("EXP3 action index");
    const double scaled = scale_reward(raw_reward);
    const double pi = probabilities()[chosen];
    const double estimated = estimated_reward(scaled, pi);
    weights_[chosen] *= std::exp(alpha_ * estimated / static_cast<double>(weights_.size()));
    const double mx = *std::max_element(weights_.begin(), weights_.end());
    if (mx > kExp3RenormThreshold)
      for (double& w : weights_) w /= mx;
    ++round_;
  }

  std::size_t most_probable() const {
    return static_cast<std::size_t>(
        std::max_element(weights_.begin(), weights_.end()) - weights_.begin());
  }

 private:
  std::vector<double> weights_;
  double alpha_;
  std::uint64_t round_ = 0;
};

// One CSV row of weights: round,w0,w1,...
inline void write_weights_row(std::ostream& os, std::uint64_t round, const std::vector<double>& w) {
  char buf[32];
  os << round;
  for (double x : w) {
    std::snprintf(buf, sizeof buf, ",%.17g", x);
    os << buf;
  }
  os << '\n';
}

}  // namespace samarl

#endif  // SAMARL_EXP3_HPP
