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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>

#include "doctest.h"
#include "liars_poker/errors.h"
#include "liars_poker/neural.h"
#include "gradient_check.h"

namespace lp = liars_poker;

namespace {

using MlpD = lp::PolicyValueMlp<double>;

lp::Observation FreshObservation(const lp::GameConfig& c, std::uint64_t seed, int player) {
  return lp::MakeObservation(lp::RoundState::Deal(c, seed, 0), player);
}

lp::PolicyNetwork SmallNet(const lp::GameConfig& c, std::uint64_t seed) {
  return lp::PolicyNetwork({c, lp::EncodingMode::kCanonicalCounts}, {16, 16}, seed);
}

}  // namespace

TEST_CASE("gradient check on an 8-parameter toy network") {
  MlpD toy(1, {1}, 2);
  CHECK(toy.NumParameters() == 8);
  CHECK(lp_test::GradientCheck(1, {1}, 2, 4, 3) < 1e-4);
}

TEST_CASE("gradient check on random small networks") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    CHECK(lp_test::GradientCheck(5, {7, 6}, 4, 8, seed) < 1e-4);
  }
  CHECK(lp_test::GradientCheck(6, {}, 5, 3, 9) < 1e-4);
  CHECK(lp_test::GradientCheck(4, {8, 8, 8}, 7, 5, 10) < 1e-4);
}

TEST_CASE("float gradients agree with the double reference") {
  const lp::GameConfig c{1, 2, 2};
  lp::PolicyNetwork net = SmallNet(c, 4);
  lp::TrainingBatch b;
  const int n = 6;
  b.features = Eigen::MatrixXf::Zero(net.input_size(), n);
  b.legal = Eigen::MatrixXf::Zero(net.num_actions(), n);
  for (int j = 0; j < n; ++j) {
    const lp::Observation obs = FreshObservation(c, j, 0);
    const auto f = lp::EncodeObservation(obs, net.encoding());
    for (int i = 0; i < net.input_size(); ++i) b.features(i, j) = f[i];
    for (const lp::Action& a : obs.legal_actions) b.legal(a.Id(c), j) = 1;
    b.actions.push_back(j % 2);
    b.advantages.push_back(0.5f - j * 0.2f);
    b.value_targets.push_back(j % 2 ? 1.0f : -1.0f);
  }
  lp::OptimizerConfig cfg;
  cfg.max_grad_norm = 0;
  lp::PolicyValueMlp<float> grads = net.mlp().ZerosLike();
  lp::ComputeGradients(net, b, cfg, &grads);

  const MlpD ref = net.mlp().Cast<double>();
  lp::PolicyValueTargets<double> t;
  t.legal = b.legal.cast<double>();
  t.actions = b.actions;
  for (float a : b.advantages) t.advantages.push_back(a);
  for (float v : b.value_targets) t.value_targets.push_back(v);
  MlpD::Activations act;
  const Eigen::MatrixXd x = b.features.cast<double>();
  ref.Forward(x, &act);
  MlpD::Matrix dl;
  MlpD::RowVector dv;
  lp::PolicyValueLoss<double>(act, t, {cfg.value_coefficient, cfg.entropy_coefficient},
                              &dl, &dv);
  MlpD gd = ref.ZerosLike();
  ref.Backward(x, act, dl, dv, &gd);
  const auto a = grads.Flatten();
  const auto d = gd.Flatten();
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - d[i]) < 1e-5);
}

TEST_CASE("encoding sizes and layout") {
  const lp::GameConfig c{3, 3, 3};
  const lp::EncodingSpec counts{c, lp::EncodingMode::kCanonicalCounts};
  const lp::EncodingSpec digits{c, lp::EncodingMode::kExplicitDigits};
  CHECK(counts.InputSize() == 170);
  CHECK(digits.InputSize() == 9 + 3 + 2 * 3 * 27 + 2);

  lp::RoundState s = lp::RoundState::Deal(c, 8, 0);
  const auto fresh = lp::EncodeObservation(lp::MakeObservation(s, 1), counts);
  REQUIRE(fresh.size() == 170);
  float hand_sum = 0;
  for (int i = 0; i < 3; ++i) hand_sum += fresh[i];
  CHECK(hand_sum == 3);
  CHECK(fresh[3 + 1] == 1);  // position one-hot of seat 1
  for (int i = 6; i < 170; ++i) CHECK(fresh[i] == 0);

  s.ApplyAction(lp::Action::MakeBid(2));   // seat 0
  s.ApplyAction(lp::Action::MakeBid(4));   // seat 1
  const auto after = lp::EncodeObservation(lp::MakeObservation(s, 2), counts);
  const int bids = 6;
  const int n = 27;
  int ones_in_p1 = 0;
  for (int i = 0; i < n; ++i) ones_in_p1 += after[bids + n + i] == 1;
  CHECK(ones_in_p1 == 1);
  CHECK(after[bids + n + 4] == 1);
  CHECK(after[bids + 2] == 1);  // seat 0's bid
  CHECK(after[168] == 0);
  CHECK(after[169] == 0);

  CHECK_THROWS_AS(lp::EncodeObservation(lp::MakeObservation(s, 2),
                                        {lp::GameConfig{3, 3, 2}, lp::EncodingMode::kCanonicalCounts}),
                  lp::InvalidArgument);
}

TEST_CASE("challenges are recorded against the bid they challenged") {
  const lp::GameConfig c{2, 2, 3};
  const lp::EncodingSpec spec{c, lp::EncodingMode::kCanonicalCounts};
  lp::RoundState s = lp::RoundState::Deal(c, 1, 0);
  s.ApplyAction(lp::Action::MakeBid(3));
  s.ApplyAction(lp::Action::Challenge());  // seat 1 challenges bid 3
  const auto f = lp::EncodeObservation(lp::MakeObservation(s, 2), spec);
  const int n = c.NumBids();
  const int challenge_block = 2 + 3 + 3 * n;
  CHECK(f[challenge_block + n + 3] == 1);
  s.ApplyAction(lp::Action::Challenge());
  s.ApplyAction(lp::Action::MakeBid(5));  // rebid
  const auto g = lp::EncodeObservation(lp::MakeObservation(s, 1), spec);
  CHECK(g[g.size() - 2] == 1);
}

namespace {

// Walks every reachable decision of every deal and checks that distinct
// information (own hand, seat, public history) never shares an encoding.
void CheckInjective(const lp::GameConfig& c, lp::EncodingMode mode) {
  const lp::EncodingSpec spec{c, mode};
  std::map<std::vector<float>, std::string> seen;
  int visited = 0;
  std::function<void(const lp::RoundState&)> walk = [&](const lp::RoundState& s) {
    for (int p = 0; p < c.num_players; ++p) {
      const lp::Observation obs = lp::MakeObservation(s, p);
      std::string key = "p" + std::to_string(p) + "|";
      const auto& hand = mode == lp::EncodingMode::kCanonicalCounts
                             ? obs.own_hand.counts()
                             : obs.own_hand.digits();
      for (int v : hand) key += std::to_string(v) + ",";
      key += "|";
      for (const lp::HistoryEntry& e : obs.history) {
        key += std::to_string(e.player) + ":" + std::to_string(e.action.Id(c)) + ";";
      }
      const auto enc = lp::EncodeObservation(obs, spec);
      const auto [it, inserted] = seen.emplace(enc, key);
      if (!inserted) CHECK(it->second == key);
      ++visited;
    }
    if (s.IsResolved()) return;
    for (const lp::Action& a : s.LegalActions()) walk(s.Child(a));
  };
  std::vector<int> digits(c.hand_length * c.num_players, 1);
  while (true) {
    std::vector<lp::Hand> hands;
    for (int p = 0; p < c.num_players; ++p) {
      hands.push_back(lp::Hand::FromDigits(
          c, {digits.begin() + p * c.hand_length, digits.begin() + (p + 1) * c.hand_length}));
    }
    walk(lp::RoundState(c, hands, 0));
    std::size_t i = 0;
    while (i < digits.size() && ++digits[i] > c.digit_cardinality) digits[i++] = 1;
    if (i == digits.size()) break;
  }
  CHECK(visited > 100);
}

}  // namespace

TEST_CASE("encoding is injective over reachable information states") {
  CheckInjective({1, 2, 2}, lp::EncodingMode::kCanonicalCounts);
  CheckInjective({2, 2, 2}, lp::EncodingMode::kExplicitDigits);
  CheckInjective({2, 2, 2}, lp::EncodingMode::kCanonicalCounts);
  CheckInjective({1, 2, 3}, lp::EncodingMode::kCanonicalCounts);
}

TEST_CASE("forward pass contracts") {
  const lp::GameConfig c{3, 3, 2};
  lp::PolicyNetwork zero({c, lp::EncodingMode::kCanonicalCounts}, {8}, 1);
  zero.mlp().Unflatten(std::vector<float>(zero.mlp().NumParameters(), 0.0f));
  const auto f = lp::EncodeObservation(FreshObservation(c, 3, 0), zero.encoding());
  const auto out = zero.Forward(f);
  CHECK(out.logits.size() == static_cast<std::size_t>(c.NumActions()));
  for (float l : out.logits) CHECK(l == 0.0f);
  CHECK(out.value == 0.0f);
  CHECK_THROWS_AS(zero.Forward(std::vector<float>(3, 0.0f)), lp::InvalidArgument);

  lp::PolicyNetwork big({c, lp::EncodingMode::kCanonicalCounts}, {64, 64}, 2);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> w(-10.0f, 10.0f);
  std::vector<float> params(big.mlp().NumParameters());
  for (float& p : params) p = w(rng);
  big.mlp().Unflatten(params);
  const auto o = big.Forward(f);
  for (float l : o.logits) CHECK(std::isfinite(l));
  CHECK(std::isfinite(o.value));

  const lp::Observation obs = FreshObservation(c, 3, 0);
  const std::vector<float> logits(c.NumActions(), 0.0f);
  const auto probs = lp::MaskedSoftmax(logits, obs.legal_actions, c);
  for (int id = 0; id < c.NumActions(); ++id) {
    CHECK(probs[id] == doctest::Approx(id < c.NumBids() ? 1.0 / 18 : 0.0));
  }
}

TEST_CASE("gradient step stationary points") {
  const lp::GameConfig c{1, 2, 2};
  lp::PolicyNetwork net = SmallNet(c, 7);
  lp::TrainingBatch b;
  b.features = Eigen::MatrixXf::Zero(net.input_size(), 2);
  b.legal = Eigen::MatrixXf::Ones(net.num_actions(), 2);
  for (int j = 0; j < 2; ++j) {
    const auto f = lp::EncodeObservation(FreshObservation(c, j, 0), net.encoding());
    for (int i = 0; i < net.input_size(); ++i) b.features(i, j) = f[i];
    b.actions.push_back(j);
    b.advantages.push_back(0.0f);
    b.value_targets.push_back(net.Forward(f).value);
  }
  const auto before = net.mlp().Flatten();
  lp::AdamOptimizer adam(net.mlp());
  lp::GradientStep(b, {}, &net, &adam);
  CHECK(net.mlp().Flatten() == before);

  b.advantages = {1.0f, -2.0f};
  b.value_targets = {3.0f, -3.0f};
  lp::OptimizerConfig zero_lr;
  zero_lr.learning_rate = 0.0;
  lp::GradientStep(b, zero_lr, &net, &adam);
  CHECK(net.mlp().Flatten() == before);

  lp::GradientStep(b, {}, &net, &adam);
  CHECK(net.mlp().Flatten() != before);

  const auto snapshot = net.mlp().Flatten();
  b.value_targets[0] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(lp::GradientStep(b, {}, &net, &adam), lp::NumericalError);
  CHECK(net.mlp().Flatten() == snapshot);
}

TEST_CASE("clipping bounds the global gradient norm") {
  const lp::GameConfig c{3, 3, 2};
  lp::PolicyNetwork net = SmallNet(c, 8);
  lp::TrainingBatch b;
  b.features = Eigen::MatrixXf::Ones(net.input_size(), 1);
  b.legal = Eigen::MatrixXf::Ones(net.num_actions(), 1);
  b.actions = {0};
  b.advantages = {100.0f};
  b.value_targets = {100.0f};
  lp::OptimizerConfig cfg;
  cfg.max_grad_norm = 0.5;
  lp::PolicyValueMlp<float> grads = net.mlp().ZerosLike();
  const lp::LossMetrics m = lp::ComputeGradients(net, b, cfg, &grads);
  CHECK(m.grad_norm > 0.5);
  double norm = 0;
  for (float g : grads.Flatten()) norm += double(g) * g;
  CHECK(std::sqrt(norm) <= doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("checkpoint round trip and corruption") {
  const lp::GameConfig c{3, 3, 2};
  const lp::PolicyNetwork net({c, lp::EncodingMode::kExplicitDigits}, {32, 16}, 11);
  const auto dir = std::filesystem::temp_directory_path() / "lpoker_neural_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "ckpt_5.bin").string();
  lp::SaveCheckpoint(net, path);
  const lp::PolicyNetwork back = lp::LoadCheckpoint(path);
  CHECK(back.encoding().mode == lp::EncodingMode::kExplicitDigits);
  CHECK(back.hidden_widths() == std::vector<int>{32, 16});
  std::mt19937_64 rng(1);
  std::normal_distribution<float> normal(0.0f, 2.0f);
  for (int k = 0; k < 1000; ++k) {
    std::vector<float> x(net.input_size());
    for (float& v : x) v = normal(rng);
    const auto a = net.Forward(x);
    const auto b = back.Forward(x);
    REQUIRE(a.logits == b.logits);
    REQUIRE(a.value == b.value);
  }
  CHECK(lp::SerializeCheckpoint(back) == lp::SerializeCheckpoint(net));

  const std::string bytes = lp::SerializeCheckpoint(net);
  CHECK(bytes.compare(0, 8, std::string(lp::kCheckpointMagic, 8)) == 0);
  CHECK_THROWS_AS(lp::DeserializeCheckpoint(bytes.substr(0, bytes.size() - 3)),
                  lp::CheckpointError);
  CHECK_THROWS_AS(lp::DeserializeCheckpoint(bytes + "x"), lp::CheckpointError);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(lp::DeserializeCheckpoint(bad_magic), lp::CheckpointError);
  std::string bad_version = bytes;
  bad_version[8] = 7;
  CHECK_THROWS_AS(lp::DeserializeCheckpoint(bad_version), lp::CheckpointError);
  CHECK_THROWS_AS(lp::LoadCheckpointFor(path, {5, 5, 2}), lp::CheckpointError);
  CHECK_NOTHROW(lp::LoadCheckpointFor(path, c));
  CHECK_THROWS_AS(lp::LoadCheckpoint((dir / "missing.bin").string()), lp::CheckpointError);
  std::filesystem::remove_all(dir);
}
