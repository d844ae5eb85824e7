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

// Information-state encoding, the policy/value network, one optimizer step,
// and the checkpoint file format.

#ifndef LIARS_POKER_NEURAL_H_
#define LIARS_POKER_NEURAL_H_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "liars_poker/engine.h"
#include "liars_poker/mlp.h"
#include "liars_poker/observation.h"

namespace liars_poker {

enum class EncodingMode : std::uint32_t {
  kExplicitDigits = 0,
  kCanonicalCounts = 1,
};
std::string EncodingModeName(EncodingMode mode);
EncodingMode ParseEncodingMode(const std::string& name);

// Feature layout, all blocks concatenated:
//
//   hand      canonical-counts: D raw counts
//             explicit-digits:  H one-hot blocks of size D in dealt order
//   position  one-hot of the actor's seat offset from the opener (L)
//   bids      for each seat offset: 1 at every bid index that seat made (L*N)
//   challenges for each seat offset: 1 at the bid index standing when that
//             seat challenged or counted (L*N)
//   rebid     1 if the standing bid is a rebid
//   terminal  1 if the round is resolved
//
// Seats are indexed relative to the opener so that the same network serves
// every opener.
struct EncodingSpec {
  GameConfig config;
  EncodingMode mode = EncodingMode::kCanonicalCounts;

  int HandBlockSize() const;
  int InputSize() const;
};

// Throws InvalidArgument when the observation's config differs from spec.
std::vector<float> EncodeObservation(const Observation& obs,
                                     const EncodingSpec& spec);
// Writes into out, which must have InputSize() entries.
void EncodeObservationInto(const Observation& obs, const EncodingSpec& spec,
                           std::span<float> out);

// Softmax over the legal action ids only; illegal entries are exactly 0.
std::vector<double> MaskedSoftmax(std::span<const float> logits,
                                  const std::vector<Action>& legal,
                                  const GameConfig& config);

inline const std::vector<int> kDefaultHiddenWidths = {256, 256};
inline const std::vector<int> kScalingHiddenWidths = {512, 512, 512, 512,
                                                      512, 512, 512};

class PolicyNetwork {
 public:
  using Mlp = PolicyValueMlp<float>;

  PolicyNetwork(EncodingSpec spec, std::vector<int> hidden,
                std::uint64_t init_seed);
  PolicyNetwork(EncodingSpec spec, Mlp mlp);

  const EncodingSpec& encoding() const { return spec_; }
  const GameConfig& config() const { return spec_.config; }
  const std::vector<int>& hidden_widths() const { return mlp_.hidden(); }
  int input_size() const { return mlp_.input_size(); }
  int num_actions() const { return mlp_.num_actions(); }

  struct Output {
    std::vector<float> logits;
    float value = 0.0f;
  };
  // Throws InvalidArgument on a length mismatch.
  Output Forward(std::span<const float> features) const;
  // Column per sample.
  void ForwardBatch(const Eigen::MatrixXf& features, Mlp::Activations* act) const;

  // Masked softmax for the observation's legal actions.
  std::vector<double> PolicyFor(const Observation& obs) const;

  Mlp& mlp() { return mlp_; }
  const Mlp& mlp() const { return mlp_; }

 private:
  EncodingSpec spec_;
  Mlp mlp_;
};

struct OptimizerConfig {
  double learning_rate = 1e-3;
  double value_coefficient = 1.0;
  double entropy_coefficient = 0.0;
  double max_grad_norm = 1.0;  // 0 disables clipping
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamOptimizer {
 public:
  explicit AdamOptimizer(const PolicyValueMlp<float>& like);
  // params -= lr * mhat / (sqrt(vhat) + eps)
  void Apply(const PolicyValueMlp<float>& grads, const OptimizerConfig& config,
             PolicyValueMlp<float>* params);
  std::int64_t steps() const { return steps_; }

 private:
  std::vector<float> m_;
  std::vector<float> v_;
  std::int64_t steps_ = 0;
};

struct TrainingBatch {
  Eigen::MatrixXf features;  // input_size x B
  Eigen::MatrixXf legal;     // num_actions x B
  std::vector<int> actions;
  std::vector<float> advantages;
  std::vector<float> value_targets;

  int size() const { return static_cast<int>(actions.size()); }
};

// Loss and gradient without touching the weights. The gradient is clipped to
// config.max_grad_norm; grad_norm reports the norm before clipping.
LossMetrics ComputeGradients(const PolicyNetwork& net,
                             const TrainingBatch& batch,
                             const OptimizerConfig& config,
                             PolicyValueMlp<float>* grads);

// ComputeGradients, then an Adam update. Throws NumericalError without
// modifying the network if the loss or gradient is not finite.
LossMetrics GradientStep(const TrainingBatch& batch,
                         const OptimizerConfig& config, PolicyNetwork* net,
                         AdamOptimizer* optimizer);

// Binary layout, little-endian:
//   char[8]  "LPOKERNN"
//   u32      format version
//   i32 x3   H, D, L
//   u32      encoding mode
//   u32      input size
//   u32      hidden layer count n, then n x u32 widths
//   u32      action count
//   f32 ...  per layer (trunk, policy head, value head): weight row-major
//            (out x in), then bias
inline constexpr char kCheckpointMagic[8] = {'L', 'P', 'O', 'K',
                                             'E', 'R', 'N', 'N'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void SaveCheckpoint(const PolicyNetwork& net, const std::string& path);
std::string SerializeCheckpoint(const PolicyNetwork& net);
// Throws CheckpointError on a bad magic, version, truncation or trailing data.
PolicyNetwork LoadCheckpoint(const std::string& path);
PolicyNetwork DeserializeCheckpoint(const std::string& bytes);
// Also throws CheckpointError unless the stored config equals `config`.
PolicyNetwork LoadCheckpointFor(const std::string& path,
                                const GameConfig& config);

}  // namespace liars_poker

#endif  // LIARS_POKER_NEURAL_H_
