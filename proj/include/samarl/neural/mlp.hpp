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

// Fully connected Q-network: affine layers with ReLU between them and an
// identity output. Samples are matrix columns.

#ifndef SAMARL_NEURAL_MLP_HPP
#define SAMARL_NEURAL_MLP_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "samarl/errors.hpp"
#include "samarl/random.hpp"

namespace samarl::neural {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ColMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Mlp {
 public:
  Mlp() = default;

  // Zero-initialised network with the given layer widths [in, ..., out].
  explicit Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw ShapeError("an MLP needs at least input and output widths");
    for (int s : sizes_)
      if (s < 1) throw ShapeError("layer widths must be >= 1");
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      weights_.push_back(Matrix::Zero(sizes_[l + 1], sizes_[l]));
      biases_.push_back(Vector::Zero(sizes_[l + 1]));
    }
  }

  // Weights and biases uniform in +-1/sqrt(fan_in).
  static Mlp random(std::vector<int> sizes, RngStream& rng) {
    Mlp m(std::move(sizes));
    for (std::size_t l = 0; l < m.weights_.size(); ++l) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(m.sizes_[l]));
      auto& w = m.weights_[l];
      for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-bound, bound);
      for (Eigen::Index i = 0; i < m.biases_[l].size(); ++i) m.biases_[l][i] = rng.uniform(-bound, bound);
    }
    return m;
  }

  const std::vector<int>& sizes() const { return sizes_; }
  int num_layers() const { return static_cast<int>(weights_.size()); }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }

  Matrix& weight(int l) { return weights_[l]; }
  const Matrix& weight(int l) const { return weights_[l]; }
  Vector& bias(int l) { return biases_[l]; }
  const Vector& bias(int l) const { return biases_[l]; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l)
      n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
    return n;
  }

  Vector forward(const Vector& input) const {
    check_input(input.size());
    Vector a = input;
    for (int l = 0; l < num_layers(); ++l) {
      Vector z = weights_[l] * a + biases_[l];
      a = l + 1 < num_layers() ? Vector(z.cwiseMax(0.0)) : z;
    }
    return a;
  }

  ColMatrix forward_batch(const ColMatrix& inputs) const {
    const int last = num_layers() - 1;
    ColMatrix h = trunk(inputs);
    ColMatrix q = weights_[last] * h;
    q.colwise() += biases_[last];
    return q;
  }

  // Activations feeding the output layer (the input itself for a one-layer net).
  ColMatrix trunk(const ColMatrix& inputs) const {
    check_input(inputs.rows());
    ColMatrix a = inputs;
    for (int l = 0; l + 1 < num_layers(); ++l) {
      ColMatrix z = weights_[l] * a;
      z.colwise() += biases_[l];
      a = z.cwiseMax(0.0);
    }
    return a;
  }

  // Output `action` given trunk activations h.
  double output_from_trunk(const Eigen::Ref<const Vector>& h, int action) const {
    const int last = num_layers() - 1;
    return weights_[last].row(action).dot(h) + biases_[last][action];
  }

  friend bool operator==(const Mlp& a, const Mlp& b) {
    if (a.sizes_ != b.sizes_) return false;
    for (std::size_t l = 0; l < a.weights_.size(); ++l)
      if (a.weights_[l] != b.weights_[l] || a.biases_[l] != b.biases_[l]) return false;
    return true;
  }

 private:
  void check_input(Eigen::Index n) const {
    if (sizes_.empty() || n != sizes_.front())
      throw ShapeError("input length " + std::to_string(n) + " does not match network input " +
                       std::to_string(sizes_.empty() ? 0 : sizes_.front()));
  }

  std::vector<int> sizes_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
};

// Gradient of one layer. When `rows` is non-empty only those output rows
// can be non-zero and `weights`/`bias` hold just them, in `rows` order.
struct LayerGradient {
  std::vector<int> rows;
  Matrix weights;
  Vector bias;

  bool sparse() const { return !rows.empty() || weights.rows() == 0; }

  Matrix dense_weights(int out, int in) const {
    if (!sparse()) return weights;
    Matrix d = Matrix::Zero(out, in);
    for (std::size_t i = 0; i < rows.size(); ++i) d.row(rows[i]) = weights.row(static_cast<Eigen::Index>(i));
    return d;
  }

  Vector dense_bias(int out) const {
    if (!sparse()) return bias;
    Vector d = Vector::Zero(out);
    for (std::size_t i = 0; i < rows.size(); ++i) d[rows[i]] = bias[static_cast<Eigen::Index>(i)];
    return d;
  }
};

struct Gradients {
  std::vector<LayerGradient> layers;
};

struct GradientResult {
  Gradients grads;
  double loss = 0.0;
  Vector predictions;
};

// Exact gradients of mean_n (targets_n - Q(inputs_n)[actions_n])^2. Only the
// chosen outputs enter the loss, so the output layer gradient is row-sparse.
inline GradientResult gradients(const Mlp& mlp, const ColMatrix& inputs,
                                std::span<const int> actions, const Vector& targets) {
  const auto n = inputs.cols();
  if (n == 0) throw ShapeError("gradient batch is empty");
  if (static_cast<Eigen::Index>(actions.size()) != n || targets.size() != n)
    throw ShapeError("batch inputs, actions and targets disagree in length");
  if (inputs.rows() != mlp.input_size()) throw ShapeError("batch input width mismatch");
  for (int a : actions)
    if (a < 0 || a >= mlp.output_size()) throw ShapeError("action index out of range");

  const int layers = mlp.num_layers();
  const int last = layers - 1;

  // Forward pass, keeping pre-activations.
  std::vector<ColMatrix> acts;  // acts[l] feeds layer l
  std::vector<ColMatrix> pre;   // pre[l] = W_l acts[l] + b_l, hidden layers only
  acts.push_back(inputs);
  for (int l = 0; l < last; ++l) {
    ColMatrix z = mlp.weight(l) * acts.back();
    z.colwise() += mlp.bias(l);
    acts.push_back(z.cwiseMax(0.0));
    pre.push_back(std::move(z));
  }
  const ColMatrix& h = acts.back();

  GradientResult res;
  res.predictions.resize(n);
  Vector dq(n);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double q = mlp.output_from_trunk(h.col(i), actions[i]);
    res.predictions[i] = q;
    const double err = q - targets[i];
    loss += err * err;
    dq[i] = 2.0 * err / static_cast<double>(n);
  }
  res.loss = loss / static_cast<double>(n);

  res.grads.layers.resize(layers);
  auto& out = res.grads.layers[last];
  out.rows.assign(actions.begin(), actions.end());
  std::sort(out.rows.begin(), out.rows.end());
  out.rows.erase(std::unique(out.rows.begin(), out.rows.end()), out.rows.end());
  out.weights = Matrix::Zero(static_cast<Eigen::Index>(out.rows.size()), h.rows());
  out.bias = Vector::Zero(static_cast<Eigen::Index>(out.rows.size()));

  ColMatrix delta(h.rows(), n);  // dL/dh
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto slot = std::lower_bound(out.rows.begin(), out.rows.end(), actions[i]) - out.rows.begin();
    out.weights.row(slot) += dq[i] * h.col(i).transpose();
    out.bias[slot] += dq[i];
    delta.col(i) = dq[i] * mlp.weight(last).row(actions[i]).transpose();
  }

  for (int l = last - 1; l >= 0; --l) {
    ColMatrix dz = delta.cwiseProduct((pre[l].array() > 0.0).cast<double>().matrix());
    auto& g = res.grads.layers[l];
    g.weights = dz * acts[l].transpose();
    g.bias = dz.rowwise().sum();
    if (l > 0) delta = mlp.weight(l).transpose() * dz;
  }
  return res;
}

}  // namespace samarl::neural

#endif  // SAMARL_NEURAL_MLP_HPP
