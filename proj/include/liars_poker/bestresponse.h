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

// Exploitability estimates against a frozen policy: a DQN exploiter trained in
// a fixed seat, and an exact best response for two-player games.

#ifndef LIARS_POKER_BESTRESPONSE_H_
#define LIARS_POKER_BESTRESPONSE_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "liars_poker/agents.h"
#include "liars_poker/combinatorics.h"
#include "liars_poker/engine.h"
#include "liars_poker/neural.h"

namespace liars_poker {

// Frozen policy queried in batches. Observations in one call may come from
// different rounds.
class PolicyOracle {
 public:
  virtual ~PolicyOracle() = default;
  virtual const GameConfig& config() const = 0;
  // One distribution over action ids per observation.
  virtual std::vector<std::vector<double>> Distributions(
      const std::vector<Observation>& observations) const = 0;
  // True if the policy can tell apart hands with equal digit counts.
  virtual bool DependsOnDigitOrder() const { return false; }
};

class UniformPolicyOracle : public PolicyOracle {
 public:
  explicit UniformPolicyOracle(GameConfig config) : config_(config) {}
  const GameConfig& config() const override { return config_; }
  std::vector<std::vector<double>> Distributions(
      const std::vector<Observation>& observations) const override;

 private:
  GameConfig config_;
};

// The network's masked softmax, optionally passed through the play-time
// filter (with the same argmax fallback as PolicyAgent).
class NetworkPolicyOracle : public PolicyOracle {
 public:
  NetworkPolicyOracle(std::shared_ptr<const PolicyNetwork> network,
                      bool filter = true);
  const GameConfig& config() const override { return network_->config(); }
  std::vector<std::vector<double>> Distributions(
      const std::vector<Observation>& observations) const override;
  bool DependsOnDigitOrder() const override {
    return network_->encoding().mode == EncodingMode::kExplicitDigits;
  }

 private:
  std::shared_ptr<const PolicyNetwork> network_;
  bool filter_;
};

struct ExactBestResponseResult {
  double value = 0.0;  // expected payout per round to the responder
  std::vector<WeightedHand> hands;
  std::vector<double> value_by_hand;
  std::int64_t nodes = 0;
};

// Two players only. Seat 0 opens; the responder sits at `position` (0 or 1).
// One pass over the public tree carries a value per responder hand and a
// reach weight per opponent hand. Opponent branches with zero reach under
// every hand are skipped. Throws InvalidArgument for L != 2 and
// NumericalError when a policy distribution does not sum to 1.
ExactBestResponseResult ExactBestResponse(const PolicyOracle& policy,
                                          int position);

struct BRConfig {
  std::string checkpoint;
  int position = 0;
  std::int64_t steps = 1000000;
  int games_per_step = 32;
  double learning_rate = 0.1;
  std::vector<int> hidden = {64, 64, 64};
  std::int64_t eval_every = 5000;
  int eval_rounds = 1000;
  int rolling_window = 10;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.1;
  std::int64_t replay_capacity = 100000;
  std::int64_t min_replay = 1000;
  std::int64_t target_sync = 1000;
  double huber_delta = 1.0;
  double max_grad_norm = 10.0;
  std::uint64_t seed = 1;

  double EpsilonAt(std::int64_t step) const;
  void Validate(const GameConfig& game) const;
};

struct BRScorePoint {
  std::int64_t step = 0;
  double score = 0.0;          // mean exploiter payout per round
  double standard_error = 0.0;
  double rolling = 0.0;        // mean of the last rolling_window scores
  double rolling_standard_error = 0.0;
};

struct BRScoreSeries {
  int position = 0;
  std::vector<BRScorePoint> points;
  double FinalRolling() const {
    return points.empty() ? 0.0 : points.back().rolling;
  }
};

// Seat `position` (opener is seat 0) learns by Q-learning with replay and a
// target network; all other seats play `opponent`. Each step advances
// games_per_step games to the exploiter's next decision and takes one SGD
// step on a replay minibatch of the same size. Evaluation plays greedily.
BRScoreSeries TrainDqnBestResponse(
    const BRConfig& config, std::shared_ptr<const PolicyOracle> opponent,
    const std::function<void(const BRScorePoint&)>& on_eval = {});
// Loads config.checkpoint for `game`; opponents use the filtered policy.
BRScoreSeries TrainDqnBestResponse(
    const BRConfig& config, const GameConfig& game,
    const std::function<void(const BRScorePoint&)>& on_eval = {});

void WriteScoreSeries(const BRScoreSeries& series, std::ostream& out);

}  // namespace liars_poker

#endif  // LIARS_POKER_BESTRESPONSE_H_
