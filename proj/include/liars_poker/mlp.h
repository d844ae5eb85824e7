// Copyright 2026 The Liar's Poker Lab Authors.
//
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

// Fully-connected trunk (ReLU) with an affine policy head and an affine scalar
// value head. Batches are column-major: one sample per column.
//
// Templated on the scalar so the float network used for training and play and
// a double copy used for finite-difference checks share one code path.

#ifndef LIARS_POKER_MLP_H_
#define LIARS_POKER_MLP_H_

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "liars_poker/errors.h"
#include "liars_poker/rng.h"

namespace liars_poker {

template <typename T>
struct DenseLayer {
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  Matrix weight;  // out x in
  Vector bias;    // out

  int in() const { return static_cast<int>(weight.cols()); }
  int out() const { return static_cast<int>(weight.rows()); }
};

template <typename T>
class PolicyValueMlp {
 public:
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using RowVector = Eigen::Matrix<T, 1, Eigen::Dynamic>;

  PolicyValueMlp() = default;
  PolicyValueMlp(int input_size, std::vector<int> hidden, int num_actions)
      : input_size_(input_size), hidden_(std::move(hidden)) {
    int prev = input_size;
    for (int w : hidden_) {
      if (w <= 0) throw InvalidArgument("hidden widths must be positive");
      trunk_.push_back(Zeros(w, prev));
      prev = w;
    }
    policy_ = Zeros(num_actions, prev);
    value_ = Zeros(1, prev);
  }

  int input_size() const { return input_size_; }
  int num_actions() const { return policy_.out(); }
  const std::vector<int>& hidden() const { return hidden_; }

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  void InitUniformFanIn(std::uint64_t seed) {
    std::mt19937_64 gen(MixSeed(seed));
    ForEachLayer([&](DenseLayer<T>& layer) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in()));
      for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
        layer.weight.data()[i] =
            static_cast<T>((2.0 * UniformUnit(gen) - 1.0) * bound);
      }
      layer.bias.setZero();
    });
  }

  struct Activations {
    std::vector<Matrix> hidden;  // post-ReLU output of each trunk layer
    Matrix logits;               // num_actions x B
    RowVector values;            // 1 x B
  };

  void Forward(const Matrix& inputs, Activations* act) const {
    if (inputs.rows() != input_size_) {
      throw InvalidArgument("network input has " +
                            std::to_string(inputs.rows()) + " rows, expected " +
                            std::to_string(input_size_));
    }
    act->hidden.resize(trunk_.size());
    const Matrix* prev = &inputs;
    for (std::size_t l = 0; l < trunk_.size(); ++l) {
      act->hidden[l].noalias() = trunk_[l].weight * *prev;
      act->hidden[l].colwise() += trunk_[l].bias;
      act->hidden[l] = act->hidden[l].cwiseMax(T(0));
      prev = &act->hidden[l];
    }
    act->logits.noalias() = policy_.weight * *prev;
    act->logits.colwise() += policy_.bias;
    act->values.noalias() = value_.weight * *prev;
    act->values.array() += value_.bias(0);
  }

  // Accumulates parameter gradients into `grads` (same shapes, zeroed by the
  // caller) given dLoss/dlogits and dLoss/dvalues for the batch.
  void Backward(const Matrix& inputs, const Activations& act,
                const Matrix& dlogits, const RowVector& dvalues,
                PolicyValueMlp* grads) const {
    const Matrix& top = trunk_.empty() ? inputs : act.hidden.back();
    grads->policy_.weight.noalias() += dlogits * top.transpose();
    grads->policy_.bias += dlogits.rowwise().sum();
    grads->value_.weight.noalias() += dvalues * top.transpose();
    grads->value_.bias(0) += dvalues.sum();
    if (trunk_.empty()) return;

    Matrix delta = policy_.weight.transpose() * dlogits;
    delta.noalias() += value_.weight.transpose() * dvalues;
    for (int l = static_cast<int>(trunk_.size()) - 1; l >= 0; --l) {
      delta = (act.hidden[l].array() > T(0)).select(delta, T(0));
      const Matrix& below = l == 0 ? inputs : act.hidden[l - 1];
      grads->trunk_[l].weight.noalias() += delta * below.transpose();
      grads->trunk_[l].bias += delta.rowwise().sum();
      if (l > 0) delta = trunk_[l].weight.transpose() * delta;
    }
  }

  PolicyValueMlp ZerosLike() const {
    PolicyValueMlp z = *this;
    z.ForEachLayer([](DenseLayer<T>& layer) {
      layer.weight.setZero();
      layer.bias.setZero();
    });
    return z;
  }

  // Visits trunk layers in order, then the policy head, then the value head.
  template <typename F>
  void ForEachLayer(F&& f) {
    for (auto& layer : trunk_) f(layer);
    f(policy_);
    f(value_);
  }
  template <typename F>
  void ForEachLayer(F&& f) const {
    for (const auto& layer : trunk_) f(layer);
    f(policy_);
    f(value_);
  }

  // Contiguous parameter blocks in checkpoint order: each layer's weight
  // (column-major storage) then bias.
  template <typename F>
  void ForEachBlock(F&& f) {
    ForEachLayer([&](DenseLayer<T>& layer) {
      f(std::span<T>(layer.weight.data(), layer.weight.size()));
      f(std::span<T>(layer.bias.data(), layer.bias.size()));
    });
  }
  template <typename F>
  void ForEachBlock(F&& f) const {
    ForEachLayer([&](const DenseLayer<T>& layer) {
      f(std::span<const T>(layer.weight.data(), layer.weight.size()));
      f(std::span<const T>(layer.bias.data(), layer.bias.size()));
    });
  }

  std::int64_t NumParameters() const {
    std::int64_t n = 0;
    ForEachBlock([&](auto block) { n += static_cast<std::int64_t>(block.size()); });
    return n;
  }

  std::vector<T> Flatten() const {
    std::vector<T> flat;
    flat.reserve(NumParameters());
    ForEachBlock([&](auto block) { flat.insert(flat.end(), block.begin(), block.end()); });
    return flat;
  }

  void Unflatten(std::span<const T> flat) {
    if (static_cast<std::int64_t>(flat.size()) != NumParameters()) {
      throw InvalidArgument("parameter vector size mismatch");
    }
    std::size_t pos = 0;
    ForEachBlock([&](std::span<T> block) {
      for (T& x : block) x = flat[pos++];
    });
  }

  template <typename U>
  PolicyValueMlp<U> Cast() const {
    PolicyValueMlp<U> out(input_size_, hidden_, num_actions());
    std::vector<T> flat = Flatten();
    std::vector<U> converted(flat.begin(), flat.end());
    out.Unflatten(converted);
    return out;
  }

  std::vector<DenseLayer<T>>& trunk() { return trunk_; }
  const std::vector<DenseLayer<T>>& trunk() const { return trunk_; }
  DenseLayer<T>& policy_head() { return policy_; }
  const DenseLayer<T>& policy_head() const { return policy_; }
  DenseLayer<T>& value_head() { return value_; }
  const DenseLayer<T>& value_head() const { return value_; }

 private:
  static DenseLayer<T> Zeros(int out, int in) {
    DenseLayer<T> layer;
    layer.weight = DenseLayer<T>::Matrix::Zero(out, in);
    layer.bias = DenseLayer<T>::Vector::Zero(out);
    return layer;
  }

  int input_size_ = 0;
  std::vector<int> hidden_;
  std::vector<DenseLayer<T>> trunk_;
  DenseLayer<T> policy_;
  DenseLayer<T> value_;
};

// Actor-critic loss over a batch:
//
//   value_coef * mean (v - G)^2  +  mean(-A * log pi(a))  -  beta * mean H(pi)
//
// where pi is the softmax of the logits restricted to legal actions.
struct LossWeights {
  double value_coefficient = 1.0;
  double entropy_coefficient = 0.0;
};

struct LossMetrics {
  double total = 0.0;
  double value_loss = 0.0;
  double policy_loss = 0.0;
  double entropy = 0.0;
  double grad_norm = 0.0;  // before clipping
};

template <typename T>
struct PolicyValueTargets {
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix legal;              // num_actions x B, 1 for legal, 0 otherwise
  std::vector<int> actions;  // taken action id per sample
  std::vector<T> advantages;
  std::vector<T> value_targets;
};

// Returns the loss and fills dlogits / dvalues.
template <typename T>
LossMetrics PolicyValueLoss(
    const typename PolicyValueMlp<T>::Activations& act,
    const PolicyValueTargets<T>& targets, const LossWeights& weights,
    typename PolicyValueMlp<T>::Matrix* dlogits,
    typename PolicyValueMlp<T>::RowVector* dvalues) {
  const Eigen::Index num_actions = act.logits.rows();
  const Eigen::Index batch = act.logits.cols();
  if (targets.legal.rows() != num_actions || targets.legal.cols() != batch ||
      static_cast<Eigen::Index>(targets.actions.size()) != batch ||
      static_cast<Eigen::Index>(targets.advantages.size()) != batch ||
      static_cast<Eigen::Index>(targets.value_targets.size()) != batch) {
    throw InvalidArgument("loss target shapes do not match the batch");
  }
  dlogits->setZero(num_actions, batch);
  dvalues->setZero(batch);
  LossMetrics m;
  if (batch == 0) return m;
  const double inv_b = 1.0 / static_cast<double>(batch);
  const double beta = weights.entropy_coefficient;

  std::vector<double> probs(num_actions), logp(num_actions);
  for (Eigen::Index j = 0; j < batch; ++j) {
    double max_logit = -INFINITY;
    for (Eigen::Index k = 0; k < num_actions; ++k) {
      if (targets.legal(k, j) > 0) {
        max_logit = std::max(max_logit, static_cast<double>(act.logits(k, j)));
      }
    }
    double z = 0.0;
    for (Eigen::Index k = 0; k < num_actions; ++k) {
      if (targets.legal(k, j) > 0) {
        z += std::exp(static_cast<double>(act.logits(k, j)) - max_logit);
      }
    }
    const double log_z = max_logit + std::log(z);
    double entropy = 0.0;
    for (Eigen::Index k = 0; k < num_actions; ++k) {
      if (targets.legal(k, j) > 0) {
        logp[k] = static_cast<double>(act.logits(k, j)) - log_z;
        probs[k] = std::exp(logp[k]);
        entropy -= probs[k] * logp[k];
      } else {
        logp[k] = 0.0;
        probs[k] = 0.0;
      }
    }
    const int a = targets.actions[j];
    if (a < 0 || a >= num_actions || targets.legal(a, j) <= 0) {
      throw InvalidArgument("training action is not legal for its sample");
    }
    const double adv = static_cast<double>(targets.advantages[j]);
    const double diff = static_cast<double>(act.values(j)) -
                        static_cast<double>(targets.value_targets[j]);
    m.value_loss += diff * diff * inv_b;
    m.policy_loss += -adv * logp[a] * inv_b;
    m.entropy += entropy * inv_b;
    (*dvalues)(j) = static_cast<T>(weights.value_coefficient * 2.0 * diff * inv_b);
    for (Eigen::Index k = 0; k < num_actions; ++k) {
      if (targets.legal(k, j) <= 0) continue;
      const double onehot = k == a ? 1.0 : 0.0;
      double g = -adv * (onehot - probs[k]);
      g += beta * probs[k] * (logp[k] + entropy);
      (*dlogits)(k, j) = static_cast<T>(g * inv_b);
    }
  }
  m.total = weights.value_coefficient * m.value_loss + m.policy_loss -
            beta * m.entropy;
  return m;
}

}  // namespace liars_poker

#endif  // LIARS_POKER_MLP_H_
