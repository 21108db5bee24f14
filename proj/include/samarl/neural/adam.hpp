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

#ifndef SAMARL_NEURAL_ADAM_HPP
#define SAMARL_NEURAL_ADAM_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "samarl/errors.hpp"
#include "samarl/neural/mlp.hpp"

namespace samarl::neural {

struct AdamState {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::vector<Matrix> m_w, v_w;
  std::vector<Vector> m_b, v_b;

  AdamState() = default;
  explicit AdamState(const Mlp& mlp, double lr = 0.001) : learning_rate(lr) {
    for (int l = 0; l < mlp.num_layers(); ++l) {
      m_w.push_back(Matrix::Zero(mlp.weight(l).rows(), mlp.weight(l).cols()));
      v_w.push_back(m_w.back());
      m_b.push_back(Vector::Zero(mlp.bias(l).size()));
      v_b.push_back(m_b.back());
    }
  }
};

namespace detail {

struct AdamCoeffs {
  double lr, b1, b2, eps, bc1, bc2;
};

// Updates n contiguous parameters; grad == nullptr means a zero gradient.
inline void adam_block(double* theta, double* m, double* v, const double* grad, Eigen::Index n,
                       const AdamCoeffs& c) {
  if (n == 0) return;
  Eigen::Map<Eigen::ArrayXd> t(theta, n), mm(m, n), vv(v, n);
  if (grad != nullptr) {
    Eigen::Map<const Eigen::ArrayXd> g(grad, n);
    mm = c.b1 * mm + (1.0 - c.b1) * g;
    vv = c.b2 * vv + (1.0 - c.b2) * g.square();
  } else {
    mm *= c.b1;
    vv *= c.b2;
  }
  t -= c.lr * (mm / c.bc1) / ((vv / c.bc2).sqrt() + c.eps);
}

}  // namespace detail

// Bias-corrected Adam over every parameter, including those whose gradient
// is zero this step.
inline void adam_step(Mlp& mlp, const Gradients& grads, AdamState& st) {
  if (static_cast<int>(grads.layers.size()) != mlp.num_layers() ||
      static_cast<int>(st.m_w.size()) != mlp.num_layers())
    throw ShapeError("Adam state / gradients do not match the network");
  ++st.step;
  const detail::AdamCoeffs c{st.learning_rate, st.beta1, st.beta2, st.epsilon,
                             1.0 - std::pow(st.beta1, static_cast<double>(st.step)),
                             1.0 - std::pow(st.beta2, static_cast<double>(st.step))};
  for (int l = 0; l < mlp.num_layers(); ++l) {
    Matrix& w = mlp.weight(l);
    Vector& b = mlp.bias(l);
    const auto& g = grads.layers[l];
    const Eigen::Index cols = w.cols();
    if (!g.sparse()) {
      if (g.weights.rows() != w.rows() || g.weights.cols() != cols || g.bias.size() != b.size())
        throw ShapeError("gradient shape mismatch");
      detail::adam_block(w.data(), st.m_w[l].data(), st.v_w[l].data(), g.weights.data(), w.size(), c);
      detail::adam_block(b.data(), st.m_b[l].data(), st.v_b[l].data(), g.bias.data(), b.size(), c);
      continue;
    }
    // Row-sparse: untouched runs of rows take the zero-gradient path.
    Eigen::Index row = 0;
    auto zero_run = [&](Eigen::Index from, Eigen::Index to) {
      detail::adam_block(w.data() + from * cols, st.m_w[l].data() + from * cols,
                         st.v_w[l].data() + from * cols, nullptr, (to - from) * cols, c);
      detail::adam_block(b.data() + from, st.m_b[l].data() + from, st.v_b[l].data() + from, nullptr,
                         to - from, c);
    };
    for (std::size_t i = 0; i < g.rows.size(); ++i) {
      const Eigen::Index r = g.rows[i];
      zero_run(row, r);
      const auto gi = static_cast<Eigen::Index>(i);
      detail::adam_block(w.data() + r * cols, st.m_w[l].data() + r * cols, st.v_w[l].data() + r * cols,
                         g.weights.data() + gi * cols, cols, c);
      detail::adam_block(b.data() + r, st.m_b[l].data() + r, st.v_b[l].data() + r, g.bias.data() + gi, 1,
                         c);
      row = r + 1;
    }
    zero_run(row, w.rows());
  }
}

}  // namespace samarl::neural

#endif  // SAMARL_NEURAL_ADAM_HPP
