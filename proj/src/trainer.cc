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

#include "liars_poker/trainer.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "liars_poker/combinatorics.h"
#include "liars_poker/errors.h"
#include "liars_poker/observation.h"
#include "liars_poker/rng.h"

namespace liars_poker {

int DefaultCutoff(const GameConfig& config) {
  const int table = config.num_players == 2   ? 10
                    : config.num_players == 3 ? 15
                                              : 25;
  return std::min(table, MaxRoundLength(config));
}

int TrainerConfig::EffectiveCutoff() const {
  return cutoff > 0 ? cutoff : DefaultCutoff(game);
}

double TrainerConfig::LearningRateAt(std::int64_t step) const {
  const std::int64_t span = lr_decay_steps > 0 ? lr_decay_steps : total_steps;
  if (span <= 0) return lr_initial;
  const double frac =
      std::min(1.0, static_cast<double>(step) / static_cast<double>(span));
  return lr_initial + (lr_floor - lr_initial) * frac;
}

void TrainerConfig::Validate() const {
  game.Validate();
  if (hidden.empty()) throw InvalidArgument("need at least one hidden layer");
  if (trajectories_per_step <= 0) {
    throw InvalidArgument("trajectories_per_step must be positive");
  }
  if (cutoff < 0 || EffectiveCutoff() > MaxRoundLength(game)) {
    throw InvalidArgument("cutoff must lie in [1, max round length]");
  }
  if (!(eta > 0.0)) throw InvalidArgument("eta must be positive");
  if (reference_interval <= 0) {
    throw InvalidArgument("reference_interval must be positive");
  }
  if (!(lr_initial > 0.0) || lr_floor < 0.0 || lr_floor > lr_initial) {
    throw InvalidArgument("need lr_initial > 0 and 0 <= lr_floor <= lr_initial");
  }
  if (!(reward_scale > 0.0)) throw InvalidArgument("reward_scale must be positive");
  if (entropy_coefficient < 0.0 || value_coefficient <= 0.0 ||
      max_grad_norm < 0.0) {
    throw InvalidArgument("loss coefficients out of range");
  }
  if (checkpoint_interval <= 0) {
    throw InvalidArgument("checkpoint_interval must be positive");
  }
  if (total_steps < 0) throw InvalidArgument("total_steps must be >= 0");
}

std::vector<Trajectory> CollectTrajectories(const PolicyNetwork& net, int n,
                                            int cutoff, std::uint64_t seed) {
  const GameConfig& config = net.config();
  const EncodingSpec& spec = net.encoding();
  std::vector<RoundState> states;
  std::vector<std::mt19937_64> gens;
  std::vector<Trajectory> out(n);
  states.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int opener = i % config.num_players;
    states.push_back(RoundState::Deal(config, DeriveSeed(seed, i, 1), opener));
    gens.emplace_back(DeriveSeed(seed, i, 2));
    out[i].opener = opener;
  }

  std::vector<int> active;
  Eigen::MatrixXf features;
  PolicyNetwork::Mlp::Activations act;
  std::vector<double> weights;
  while (true) {
    active.clear();
    for (int i = 0; i < n; ++i) {
      if (!states[i].IsResolved() &&
          static_cast<int>(out[i].steps.size()) < cutoff) {
        active.push_back(i);
      }
    }
    if (active.empty()) break;
    features.resize(spec.InputSize(), static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) {
      const RoundState& s = states[active[k]];
      EncodeObservationInto(MakeObservation(s, s.to_act()), spec,
                            std::span<float>(features.col(k).data(),
                                             features.rows()));
    }
    net.ForwardBatch(features, &act);
    for (std::size_t k = 0; k < active.size(); ++k) {
      const int i = active[k];
      RoundState& s = states[i];
      const std::vector<Action> legal = s.LegalActions();
      const std::vector<double> probs = MaskedSoftmax(
          std::span<const float>(act.logits.col(k).data(), act.logits.rows()),
          legal, config);
      const int id = SampleIndex(probs, UniformUnit(gens[i]));
      TrajectoryStep step;
      step.player = s.to_act();
      step.features.assign(features.col(k).data(),
                           features.col(k).data() + features.rows());
      for (Action a : legal) step.legal.push_back(a.Id(config));
      step.action = id;
      step.behavior_probability = probs[id];
      out[i].steps.push_back(std::move(step));
      s.ApplyAction(Action::FromId(config, id));
    }
  }
  for (int i = 0; i < n; ++i) {
    out[i].terminated = states[i].IsResolved();
    if (out[i].terminated) out[i].payouts = states[i].payouts();
  }
  return out;
}

namespace {

void CheckCompatible(const PolicyNetwork& a, const PolicyNetwork& b) {
  if (!(a.config() == b.config()) || a.input_size() != b.input_size() ||
      a.num_actions() != b.num_actions()) {
    throw InvalidArgument("reference and current networks differ in shape");
  }
}

// log pi(action) under the softmax restricted to `legal`.
double LogProb(const float* logits, const std::vector<int>& legal, int action) {
  double max_logit = -INFINITY;
  for (int id : legal) max_logit = std::max(max_logit, double{logits[id]});
  double z = 0.0;
  for (int id : legal) z += std::exp(double{logits[id]} - max_logit);
  return double{logits[action]} - max_logit - std::log(z);
}

// Fills features/legal/actions for the given steps starting at column `col`.
void PackSteps(const std::vector<TrajectoryStep>& steps, Eigen::Index col,
               TrainingBatch* batch) {
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const TrajectoryStep& s = steps[t];
    std::copy(s.features.begin(), s.features.end(),
              batch->features.col(col + t).data());
    for (int id : s.legal) batch->legal(id, col + t) = 1.0f;
    batch->actions[col + t] = s.action;
  }
}

void FillTargets(const Trajectory& traj, Eigen::Index col,
                 const PolicyNetwork::Mlp::Activations& cur,
                 const PolicyNetwork::Mlp::Activations& ref, double eta,
                 double reward_scale, StepTargets* targets) {
  const std::size_t len = traj.steps.size();
  targets->returns.assign(len, 0.0f);
  targets->advantages.assign(len, 0.0f);
  targets->penalties.assign(len, 0.0f);
  std::vector<double> running(traj.payouts.size());
  for (std::size_t p = 0; p < running.size(); ++p) {
    running[p] = reward_scale * traj.payouts[p];
  }
  for (std::size_t t = len; t-- > 0;) {
    const TrajectoryStep& s = traj.steps[t];
    const Eigen::Index c = col + static_cast<Eigen::Index>(t);
    const double lp_cur = LogProb(cur.logits.col(c).data(), s.legal, s.action);
    const double lp_ref = LogProb(ref.logits.col(c).data(), s.legal, s.action);
    const double penalty = -eta * (lp_cur - lp_ref);
    running[s.player] += penalty;
    targets->penalties[t] = static_cast<float>(penalty);
    targets->returns[t] = static_cast<float>(running[s.player]);
    targets->advantages[t] =
        static_cast<float>(running[s.player] - double{cur.values(c)});
  }
}

}  // namespace

StepTargets RegularizedReturns(const Trajectory& trajectory,
                               const PolicyNetwork& current,
                               const PolicyNetwork& reference, double eta,
                               double reward_scale) {
  CheckCompatible(current, reference);
  if (!trajectory.terminated) {
    throw InvalidArgument("regularized returns need a terminated trajectory");
  }
  const Eigen::Index len = static_cast<Eigen::Index>(trajectory.steps.size());
  TrainingBatch batch;
  batch.features.setZero(current.input_size(), len);
  batch.legal.setZero(current.num_actions(), len);
  batch.actions.assign(len, 0);
  PackSteps(trajectory.steps, 0, &batch);
  PolicyNetwork::Mlp::Activations cur, ref;
  current.ForwardBatch(batch.features, &cur);
  reference.ForwardBatch(batch.features, &ref);
  StepTargets targets;
  FillTargets(trajectory, 0, cur, ref, eta, reward_scale, &targets);
  return targets;
}

TrainingBatch BuildTrainingBatch(const std::vector<Trajectory>& trajectories,
                                 const PolicyNetwork& current,
                                 const PolicyNetwork& reference, double eta,
                                 double reward_scale) {
  CheckCompatible(current, reference);
  Eigen::Index total = 0;
  for (const Trajectory& t : trajectories) {
    if (t.terminated) total += static_cast<Eigen::Index>(t.steps.size());
  }
  TrainingBatch batch;
  batch.features.setZero(current.input_size(), total);
  batch.legal.setZero(current.num_actions(), total);
  batch.actions.assign(total, 0);
  batch.advantages.assign(total, 0.0f);
  batch.value_targets.assign(total, 0.0f);
  Eigen::Index col = 0;
  for (const Trajectory& t : trajectories) {
    if (!t.terminated) continue;
    PackSteps(t.steps, col, &batch);
    col += static_cast<Eigen::Index>(t.steps.size());
  }
  if (total == 0) return batch;
  PolicyNetwork::Mlp::Activations cur, ref;
  current.ForwardBatch(batch.features, &cur);
  reference.ForwardBatch(batch.features, &ref);
  col = 0;
  StepTargets targets;
  for (const Trajectory& t : trajectories) {
    if (!t.terminated) continue;
    FillTargets(t, col, cur, ref, eta, reward_scale, &targets);
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
      batch.value_targets[col + k] = targets.returns[k];
      batch.advantages[col + k] = targets.advantages[k];
    }
    col += static_cast<Eigen::Index>(t.steps.size());
  }
  return batch;
}

std::string CheckpointFileName(std::int64_t steps) {
  return "ckpt_" + std::to_string(steps) + ".bin";
}

namespace {

StepMetrics Summarize(std::int64_t step, double lr,
                      const std::vector<Trajectory>& trajectories,
                      const GameConfig& config) {
  StepMetrics m;
  m.step = step;
  m.learning_rate = lr;
  m.seat_equity.assign(config.num_players, 0.0);
  int terminated = 0;
  double length = 0.0;
  for (const Trajectory& t : trajectories) {
    if (!t.terminated) continue;
    ++terminated;
    length += static_cast<double>(t.steps.size());
    for (int p = 0; p < config.num_players; ++p) m.seat_equity[p] += t.payouts[p];
  }
  const double n = static_cast<double>(trajectories.size());
  m.unterminated_fraction = n > 0 ? (n - terminated) / n : 0.0;
  if (terminated > 0) {
    m.mean_round_length = length / terminated;
    for (double& e : m.seat_equity) e /= terminated;
  }
  return m;
}

void WriteMetricsHeader(std::ostream& out, const GameConfig& config) {
  out << "step,lr,loss,value_loss,policy_loss,entropy,grad_norm,batch_size,"
         "unterminated_fraction,mean_round_length";
  for (int p = 0; p < config.num_players; ++p) out << ",equity_seat" << p;
  out << "\n";
}

void WriteMetricsRow(std::ostream& out, const StepMetrics& m) {
  out << m.step << "," << m.learning_rate << "," << m.loss.total << ","
      << m.loss.value_loss << "," << m.loss.policy_loss << ","
      << m.loss.entropy << "," << m.loss.grad_norm << "," << m.batch_size
      << "," << m.unterminated_fraction << "," << m.mean_round_length;
  for (double e : m.seat_equity) out << "," << e;
  out << "\n";
  out.flush();
}

}  // namespace

TrainResult Train(const TrainerConfig& config,
                  const std::function<void(const StepMetrics&)>& on_step) {
  config.Validate();
  namespace fs = std::filesystem;
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  const int cutoff = config.EffectiveCutoff();

  EncodingSpec spec{config.game, config.encoding};
  PolicyNetwork net(spec, config.hidden, DeriveSeed(config.seed, 0x1417));
  PolicyNetwork reference = net;
  AdamOptimizer optimizer(net.mlp());
  OptimizerConfig opt;
  opt.value_coefficient = config.value_coefficient;
  opt.entropy_coefficient = config.entropy_coefficient;
  opt.max_grad_norm = config.max_grad_norm;

  TrainResult result;
  auto checkpoint = [&](std::int64_t step) {
    const std::string path = (dir / CheckpointFileName(step)).string();
    SaveCheckpoint(net, path);
    result.checkpoints.push_back(path);
  };
  checkpoint(0);

  std::ofstream metrics((dir / config.metrics_file).string(), std::ios::trunc);
  if (!metrics) throw InvalidArgument("cannot write metrics log in " + config.out_dir);
  WriteMetricsHeader(metrics, config.game);

  for (std::int64_t step = 1; step <= config.total_steps; ++step) {
    opt.learning_rate = config.LearningRateAt(step - 1);
    const std::vector<Trajectory> trajectories = CollectTrajectories(
        net, config.trajectories_per_step, cutoff, DeriveSeed(config.seed, step));
    const TrainingBatch batch = BuildTrainingBatch(
        trajectories, net, reference, config.eta, config.reward_scale);
    StepMetrics m = Summarize(step, opt.learning_rate, trajectories, config.game);
    m.batch_size = batch.size();
    if (batch.size() > 0) {
      try {
        m.loss = GradientStep(batch, opt, &net, &optimizer);
      } catch (const NumericalError& e) {
        std::ofstream dump(
            (dir / ("diagnostic_" + std::to_string(step) + ".txt")).string());
        dump << "step " << step << "\nlearning_rate " << opt.learning_rate
             << "\nbatch_size " << batch.size() << "\nunterminated_fraction "
             << m.unterminated_fraction << "\nerror " << e.what() << "\n";
        double norm = 0.0;
        net.mlp().ForEachBlock([&](std::span<const float> b) {
          for (float w : b) norm += double{w} * w;
        });
        dump << "parameter_norm " << std::sqrt(norm) << "\n";
        SaveCheckpoint(net, (dir / ("diagnostic_" + std::to_string(step) +
                                    ".bin")).string());
        throw;
      }
    }
    if (step % config.reference_interval == 0) reference = net;
    WriteMetricsRow(metrics, m);
    if (on_step) on_step(m);
    result.metrics.push_back(std::move(m));
    if (step % config.checkpoint_interval == 0 || step == config.total_steps) {
      checkpoint(step);
    }
  }
  return result;
}

}  // namespace liars_poker
