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

#include "liars_poker/neural.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "liars_poker/errors.h"

namespace liars_poker {

std::string EncodingModeName(EncodingMode mode) {
  return mode == EncodingMode::kExplicitDigits ? "explicit-digits"
                                               : "canonical-counts";
}

EncodingMode ParseEncodingMode(const std::string& name) {
  if (name == "explicit-digits" || name == "digits") {
    return EncodingMode::kExplicitDigits;
  }
  if (name == "canonical-counts" || name == "counts") {
    return EncodingMode::kCanonicalCounts;
  }
  throw InvalidArgument("unknown encoding mode '" + name + "'");
}

int EncodingSpec::HandBlockSize() const {
  return mode == EncodingMode::kCanonicalCounts
             ? config.digit_cardinality
             : config.hand_length * config.digit_cardinality;
}

int EncodingSpec::InputSize() const {
  const int l = config.num_players;
  return HandBlockSize() + l + 2 * l * config.NumBids() + 2;
}

void EncodeObservationInto(const Observation& obs, const EncodingSpec& spec,
                           std::span<float> out) {
  if (!(obs.config == spec.config)) {
    throw InvalidArgument("observation config " + obs.config.ToString() +
                          " does not match encoding config " +
                          spec.config.ToString());
  }
  if (static_cast<int>(out.size()) != spec.InputSize()) {
    throw InvalidArgument("encoding buffer has the wrong size");
  }
  const GameConfig& c = spec.config;
  const int d = c.digit_cardinality;
  const int n = c.NumBids();
  const int l = c.num_players;
  std::fill(out.begin(), out.end(), 0.0f);

  int pos = 0;
  if (spec.mode == EncodingMode::kCanonicalCounts) {
    const auto& counts = obs.own_hand.counts();
    if (static_cast<int>(counts.size()) != d) {
      throw InvalidArgument("hand does not match config");
    }
    for (int r = 0; r < d; ++r) out[pos + r] = static_cast<float>(counts[r]);
  } else {
    const auto& digits = obs.own_hand.digits();
    if (static_cast<int>(digits.size()) != c.hand_length) {
      throw InvalidArgument("hand does not match config");
    }
    for (int i = 0; i < c.hand_length; ++i) {
      out[pos + i * d + digits[i] - 1] = 1.0f;
    }
  }
  pos += spec.HandBlockSize();

  out[pos + obs.RelativeSeat(obs.player)] = 1.0f;
  pos += l;

  const int bids_base = pos;
  const int challenges_base = pos + l * n;
  int standing = -1;
  for (const HistoryEntry& e : obs.history) {
    const int rel = obs.RelativeSeat(e.player);
    if (e.action.is_bid()) {
      standing = e.action.bid_index();
      out[bids_base + rel * n + standing] = 1.0f;
    } else if (standing >= 0) {
      out[challenges_base + rel * n + standing] = 1.0f;
    } else {
      throw InvalidArgument("history has a challenge before any bid");
    }
  }
  pos = challenges_base + l * n;
  out[pos] = obs.standing_bid && obs.standing_bid->is_rebid ? 1.0f : 0.0f;
  out[pos + 1] = obs.phase == Phase::kResolved ? 1.0f : 0.0f;
}

std::vector<float> EncodeObservation(const Observation& obs,
                                     const EncodingSpec& spec) {
  std::vector<float> out(spec.InputSize());
  EncodeObservationInto(obs, spec, out);
  return out;
}

std::vector<double> MaskedSoftmax(std::span<const float> logits,
                                  const std::vector<Action>& legal,
                                  const GameConfig& config) {
  std::vector<double> probs(config.NumActions(), 0.0);
  if (legal.empty()) return probs;
  double max_logit = -INFINITY;
  for (Action a : legal) {
    max_logit = std::max(max_logit, static_cast<double>(logits[a.Id(config)]));
  }
  double z = 0.0;
  for (Action a : legal) {
    const int id = a.Id(config);
    probs[id] = std::exp(static_cast<double>(logits[id]) - max_logit);
    z += probs[id];
  }
  for (Action a : legal) probs[a.Id(config)] /= z;
  return probs;
}

PolicyNetwork::PolicyNetwork(EncodingSpec spec, std::vector<int> hidden,
                             std::uint64_t init_seed)
    : spec_(spec),
      mlp_(spec.InputSize(), std::move(hidden), spec.config.NumActions()) {
  spec_.config.Validate();
  mlp_.InitUniformFanIn(init_seed);
}

PolicyNetwork::PolicyNetwork(EncodingSpec spec, Mlp mlp)
    : spec_(spec), mlp_(std::move(mlp)) {
  spec_.config.Validate();
  if (mlp_.input_size() != spec_.InputSize() ||
      mlp_.num_actions() != spec_.config.NumActions()) {
    throw InvalidArgument("network shape does not match the encoding");
  }
}

PolicyNetwork::Output PolicyNetwork::Forward(
    std::span<const float> features) const {
  if (static_cast<int>(features.size()) != input_size()) {
    throw InvalidArgument("feature vector has " +
                          std::to_string(features.size()) +
                          " entries, expected " + std::to_string(input_size()));
  }
  Eigen::MatrixXf x =
      Eigen::Map<const Eigen::VectorXf>(features.data(), features.size());
  Mlp::Activations act;
  mlp_.Forward(x, &act);
  Output out;
  out.logits.assign(act.logits.data(), act.logits.data() + act.logits.size());
  out.value = act.values(0);
  return out;
}

void PolicyNetwork::ForwardBatch(const Eigen::MatrixXf& features,
                                 Mlp::Activations* act) const {
  mlp_.Forward(features, act);
}

std::vector<double> PolicyNetwork::PolicyFor(const Observation& obs) const {
  const std::vector<float> features = EncodeObservation(obs, spec_);
  const Output out = Forward(features);
  return MaskedSoftmax(out.logits, obs.legal_actions, spec_.config);
}

AdamOptimizer::AdamOptimizer(const PolicyValueMlp<float>& like)
    : m_(like.NumParameters(), 0.0f), v_(like.NumParameters(), 0.0f) {}

void AdamOptimizer::Apply(const PolicyValueMlp<float>& grads,
                          const OptimizerConfig& config,
                          PolicyValueMlp<float>* params) {
  if (grads.NumParameters() != static_cast<std::int64_t>(m_.size()) ||
      params->NumParameters() != static_cast<std::int64_t>(m_.size())) {
    throw InvalidArgument("optimizer state does not match the network");
  }
  ++steps_;
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  const float step = static_cast<float>(config.learning_rate / c1);
  const float inv_c2 = static_cast<float>(1.0 / c2);
  const float eps = static_cast<float>(config.epsilon);
  const float fb1 = static_cast<float>(b1);
  const float fb2 = static_cast<float>(b2);

  std::vector<std::span<const float>> gblocks;
  grads.ForEachBlock([&](std::span<const float> b) { gblocks.push_back(b); });
  std::size_t block = 0;
  std::size_t offset = 0;
  params->ForEachBlock([&](std::span<float> p) {
    const std::span<const float> g = gblocks[block++];
    for (std::size_t i = 0; i < p.size(); ++i) {
      float& m = m_[offset + i];
      float& v = v_[offset + i];
      m = fb1 * m + (1.0f - fb1) * g[i];
      v = fb2 * v + (1.0f - fb2) * g[i] * g[i];
      p[i] -= step * m / (std::sqrt(v * inv_c2) + eps);
    }
    offset += p.size();
  });
}

LossMetrics ComputeGradients(const PolicyNetwork& net,
                             const TrainingBatch& batch,
                             const OptimizerConfig& config,
                             PolicyValueMlp<float>* grads) {
  if (batch.features.rows() != net.input_size() ||
      batch.features.cols() != batch.size()) {
    throw InvalidArgument("batch features have the wrong shape");
  }
  PolicyNetwork::Mlp::Activations act;
  net.ForwardBatch(batch.features, &act);
  PolicyValueTargets<float> targets{batch.legal, batch.actions,
                                    batch.advantages, batch.value_targets};
  LossWeights weights{config.value_coefficient, config.entropy_coefficient};
  PolicyNetwork::Mlp::Matrix dlogits;
  PolicyNetwork::Mlp::RowVector dvalues;
  LossMetrics m =
      PolicyValueLoss<float>(act, targets, weights, &dlogits, &dvalues);
  *grads = net.mlp().ZerosLike();
  net.mlp().Backward(batch.features, act, dlogits, dvalues, grads);
  double sq = 0.0;
  grads->ForEachBlock([&](std::span<const float> b) {
    for (float g : b) sq += static_cast<double>(g) * g;
  });
  m.grad_norm = std::sqrt(sq);
  if (std::isfinite(m.grad_norm) && config.max_grad_norm > 0.0 &&
      m.grad_norm > config.max_grad_norm) {
    const float scale = static_cast<float>(config.max_grad_norm / m.grad_norm);
    grads->ForEachBlock([&](std::span<float> b) {
      for (float& g : b) g *= scale;
    });
  }
  return m;
}

LossMetrics GradientStep(const TrainingBatch& batch,
                         const OptimizerConfig& config, PolicyNetwork* net,
                         AdamOptimizer* optimizer) {
  PolicyValueMlp<float> grads;
  LossMetrics m = ComputeGradients(*net, batch, config, &grads);
  if (!std::isfinite(m.total) || !std::isfinite(m.grad_norm)) {
    std::ostringstream msg;
    msg << "non-finite loss: total=" << m.total << " value=" << m.value_loss
        << " policy=" << m.policy_loss << " entropy=" << m.entropy
        << " grad_norm=" << m.grad_norm;
    throw NumericalError(msg.str());
  }
  optimizer->Apply(grads, config, &net->mlp());
  return m;
}

namespace {

class Writer {
 public:
  void U32(std::uint32_t x) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>(x >> (8 * i)));
  }
  void I32(std::int32_t x) { U32(static_cast<std::uint32_t>(x)); }
  void F32(float x) { U32(std::bit_cast<std::uint32_t>(x)); }
  void Bytes(const char* p, std::size_t n) { buf_.append(p, n); }
  std::string Take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}
  std::uint32_t U32() {
    Need(4);
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) {
      x |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return x;
  }
  std::int32_t I32() { return static_cast<std::int32_t>(U32()); }
  float F32() { return std::bit_cast<float>(U32()); }
  std::string Bytes(std::size_t n) {
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw CheckpointError("checkpoint is truncated");
    }
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string SerializeCheckpoint(const PolicyNetwork& net) {
  Writer w;
  w.Bytes(kCheckpointMagic, sizeof(kCheckpointMagic));
  w.U32(kCheckpointVersion);
  const GameConfig& c = net.config();
  w.I32(c.hand_length);
  w.I32(c.digit_cardinality);
  w.I32(c.num_players);
  w.U32(static_cast<std::uint32_t>(net.encoding().mode));
  w.U32(static_cast<std::uint32_t>(net.input_size()));
  w.U32(static_cast<std::uint32_t>(net.hidden_widths().size()));
  for (int width : net.hidden_widths()) w.U32(static_cast<std::uint32_t>(width));
  w.U32(static_cast<std::uint32_t>(net.num_actions()));
  net.mlp().ForEachLayer([&](const DenseLayer<float>& layer) {
    for (int r = 0; r < layer.out(); ++r) {
      for (int k = 0; k < layer.in(); ++k) w.F32(layer.weight(r, k));
    }
    for (int r = 0; r < layer.out(); ++r) w.F32(layer.bias(r));
  });
  return w.Take();
}

void SaveCheckpoint(const PolicyNetwork& net, const std::string& path) {
  const std::string bytes = SerializeCheckpoint(net);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write checkpoint " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("failed writing checkpoint " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw CheckpointError("cannot move checkpoint into place at " + path);
  }
}

PolicyNetwork DeserializeCheckpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.Bytes(sizeof(kCheckpointMagic)) !=
      std::string(kCheckpointMagic, sizeof(kCheckpointMagic))) {
    throw CheckpointError("not a policy checkpoint (bad magic)");
  }
  const std::uint32_t version = r.U32();
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " +
                          std::to_string(version));
  }
  EncodingSpec spec;
  spec.config.hand_length = r.I32();
  spec.config.digit_cardinality = r.I32();
  spec.config.num_players = r.I32();
  try {
    spec.config.Validate();
  } catch (const InvalidArgument& e) {
    throw CheckpointError(std::string("checkpoint config invalid: ") + e.what());
  }
  const std::uint32_t mode = r.U32();
  if (mode > 1) throw CheckpointError("unknown encoding mode in checkpoint");
  spec.mode = static_cast<EncodingMode>(mode);
  const std::uint32_t input_size = r.U32();
  if (static_cast<int>(input_size) != spec.InputSize()) {
    throw CheckpointError("checkpoint input size does not match its encoding");
  }
  const std::uint32_t depth = r.U32();
  if (depth > 64) throw CheckpointError("implausible hidden layer count");
  std::vector<int> hidden;
  for (std::uint32_t i = 0; i < depth; ++i) {
    const std::uint32_t width = r.U32();
    if (width == 0 || width > (1u << 20)) {
      throw CheckpointError("implausible hidden width");
    }
    hidden.push_back(static_cast<int>(width));
  }
  const std::uint32_t actions = r.U32();
  if (static_cast<int>(actions) != spec.config.NumActions()) {
    throw CheckpointError("checkpoint action count does not match its config");
  }
  PolicyValueMlp<float> mlp(spec.InputSize(), hidden, spec.config.NumActions());
  mlp.ForEachLayer([&](DenseLayer<float>& layer) {
    for (int row = 0; row < layer.out(); ++row) {
      for (int k = 0; k < layer.in(); ++k) layer.weight(row, k) = r.F32();
    }
    for (int row = 0; row < layer.out(); ++row) layer.bias(row) = r.F32();
  });
  if (!r.AtEnd()) throw CheckpointError("trailing bytes after checkpoint");
  return PolicyNetwork(spec, std::move(mlp));
}

PolicyNetwork LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read checkpoint " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return DeserializeCheckpoint(bytes);
}

PolicyNetwork LoadCheckpointFor(const std::string& path,
                                const GameConfig& config) {
  PolicyNetwork net = LoadCheckpoint(path);
  if (!(net.config() == config)) {
    throw CheckpointError("checkpoint " + path + " is for " +
                          net.config().ToString() + ", not " +
                          config.ToString());
  }
  return net;
}

}  // namespace liars_poker
