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

// Self-play training with a single shared policy. Each learner step collects a
// batch of rounds, shapes every acting step's reward with a penalty
// -eta * (log pi(a|s) - log pi_ref(a|s)) toward a reference network, and takes
// one actor-critic step on undiscounted returns. The reference network is
// replaced by a copy of the current one every K learner steps.

#ifndef LIARS_POKER_TRAINER_H_
#define LIARS_POKER_TRAINER_H_

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "liars_poker/engine.h"
#include "liars_poker/neural.h"

namespace liars_poker {

// Move limit per round: 10 for two players, 15 for three, 25 beyond; capped
// at the longest legal round.
int DefaultCutoff(const GameConfig& config);

struct TrainerConfig {
  GameConfig game;
  EncodingMode encoding = EncodingMode::kCanonicalCounts;
  std::vector<int> hidden = kDefaultHiddenWidths;
  int trajectories_per_step = 128;
  int cutoff = 0;  // 0 selects DefaultCutoff
  double eta = 0.2;
  std::int64_t reference_interval = 1000;
  // Linear decay from lr_initial to lr_floor over lr_decay_steps (0 means the
  // whole run), then constant.
  double lr_initial = 1e-3;
  double lr_floor = 1e-4;
  std::int64_t lr_decay_steps = 0;
  double reward_scale = 1.0;
  double entropy_coefficient = 0.0;
  double value_coefficient = 1.0;
  double max_grad_norm = 1.0;
  std::int64_t checkpoint_interval = 1000;
  std::int64_t total_steps = 10000;
  std::uint64_t seed = 1;
  std::string out_dir = "run";
  std::string metrics_file = "metrics.csv";  // relative to out_dir

  int EffectiveCutoff() const;
  double LearningRateAt(std::int64_t step) const;
  // Throws InvalidArgument.
  void Validate() const;
};

struct TrajectoryStep {
  int player = 0;
  std::vector<float> features;
  std::vector<int> legal;  // action ids
  int action = 0;
  double behavior_probability = 0.0;
};

struct Trajectory {
  int opener = 0;
  std::vector<TrajectoryStep> steps;
  bool terminated = false;
  std::vector<int> payouts;  // empty when unterminated
};

// n self-play rounds, all seats sampling from the raw masked softmax of `net`.
// Round i opens with seat i mod L. A round still unresolved after `cutoff`
// moves is abandoned and marked unterminated.
std::vector<Trajectory> CollectTrajectories(const PolicyNetwork& net, int n,
                                            int cutoff, std::uint64_t seed);

struct StepTargets {
  std::vector<float> returns;     // per step
  std::vector<float> advantages;  // return - predicted value
  std::vector<float> penalties;   // -eta * (log pi - log pi_ref)
};

// Throws InvalidArgument for an unterminated trajectory or mismatched nets.
StepTargets RegularizedReturns(const Trajectory& trajectory,
                               const PolicyNetwork& current,
                               const PolicyNetwork& reference, double eta,
                               double reward_scale);

// Steps of every terminated trajectory with their regularized targets.
TrainingBatch BuildTrainingBatch(const std::vector<Trajectory>& trajectories,
                                 const PolicyNetwork& current,
                                 const PolicyNetwork& reference, double eta,
                                 double reward_scale);

struct StepMetrics {
  std::int64_t step = 0;
  double learning_rate = 0.0;
  LossMetrics loss;
  double unterminated_fraction = 0.0;
  double mean_round_length = 0.0;  // moves, over terminated rounds
  std::vector<double> seat_equity;  // mean payout per seat, terminated rounds
  int batch_size = 0;
};

struct TrainResult {
  std::vector<std::string> checkpoints;
  std::vector<StepMetrics> metrics;
};

std::string CheckpointFileName(std::int64_t steps);

// Writes ckpt_<steps>.bin (including ckpt_0.bin) and the metrics log into
// out_dir. On a non-finite loss writes diagnostic_<step>.txt and rethrows.
TrainResult Train(const TrainerConfig& config,
                  const std::function<void(const StepMetrics&)>& on_step = {});

}  // namespace liars_poker

#endif  // LIARS_POKER_TRAINER_H_
