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

#ifndef SAMARL_NEURAL_REPLAY_HPP
#define SAMARL_NEURAL_REPLAY_HPP

#include <algorithm>
#include <cstdint>
#include <vector>

#include "samarl/errors.hpp"
#include "samarl/neural/mlp.hpp"
#include "samarl/random.hpp"

namespace samarl::neural {

struct Experience {
  Vector state;
  int action = 0;
  double reward = 0.0;
  Vector next_state;
  // Partition seen in next_state; selects the legal actions for the target.
  std::uint64_t next_owned_mask = 0;
};

// Fixed-capacity ring: once full, each push overwrites the oldest entry.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 100000) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("replay capacity must be >= 1");
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  void push(Experience e) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(e));
    } else {
      items_[cursor_] = std::move(e);
    }
    cursor_ = (cursor_ + 1) % capacity_;
  }

  const Experience& operator[](std::size_t i) const { return items_[i]; }

  // Oldest first.
  std::vector<const Experience*> chronological() const {
    std::vector<const Experience*> out;
    const std::size_t start = items_.size() < capacity_ ? 0 : cursor_;
    for (std::size_t i = 0; i < items_.size(); ++i) out.push_back(&items_[(start + i) % items_.size()]);
    return out;
  }

  // n distinct slots chosen uniformly (Floyd's algorithm).
  std::vector<std::size_t> sample(std::size_t n, RngStream& rng) const {
    const std::size_t size = items_.size();
    if (n > size) throw ShapeError("cannot sample more experiences than stored");
    std::vector<std::size_t> picked;
    picked.reserve(n);
    for (std::size_t j = size - n; j < size; ++j) {
      const std::size_t t = static_cast<std::size_t>(rng.below(j + 1));
      if (std::find(picked.begin(), picked.end(), t) == picked.end())
        picked.push_back(t);
      else
        picked.push_back(j);
    }
    return picked;
  }

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Experience> items_;
};

}  // namespace samarl::neural

#endif  // SAMARL_NEURAL_REPLAY_HPP
