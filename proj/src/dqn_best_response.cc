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

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <random>

#include "liars_poker/bestresponse.h"
#include "liars_poker/errors.h"
#include "liars_poker/rng.h"

namespace liars_poker {

double BRConfig::EpsilonAt(std::int64_t step) const {
  const double horizon = epsilon_decay_fraction * static_cast<double>(steps);
  if (horizon <= 0.0) return epsilon_end;
  const double frac = std::min(1.0, static_cast<double>(step) / horizon);
  return epsilon_start + (epsilon_end - epsilon_start) * frac;
}

void BRConfig::Validate(const GameConfig& game) const {
  game.Validate();
  if (position < 0 || position >= game.num_players) {
    throw InvalidArgument("exploiter position out of range");
  }
  if (steps < 0 || games_per_step <= 0 || eval_every <= 0 ||
      eval_rounds <= 0 || rolling_window <= 0 || replay_capacity <= 0 ||
      target_sync <= 0 || min_replay < 0) {
    throw InvalidArgument("best-response counts must be positive");
  }
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
  if (hidden.empty()) throw InvalidArgument("need at least one hidden layer");
  if (epsilon_start < 0.0 || epsilon_start > 1.0 || epsilon_end < 0.0 ||
      epsilon_end > 1.0) {
    throw InvalidArgument("epsilon must lie in [0, 1]");
  }
}

namespace {

using QNet = PolicyValueMlp<float>;

class Replay {
 public:
  Replay(std::int64_t capacity, int input, int actions)
      : capacity_(capacity), input_(input), actions_(actions) {}

  void Add(std::span<const float> s, int a, float r, bool done,
           std::span<const float> next, const std::vector<Action>& next_legal,
           const GameConfig& config) {
    if (size_ < capacity_) {
      states_.resize((size_ + 1) * input_);
      next_.resize((size_ + 1) * input_);
      masks_.resize((size_ + 1) * actions_);
      action_.push_back(0);
      reward_.push_back(0);
      done_.push_back(0);
      ++size_;
    }
    const std::int64_t i = head_;
    head_ = (head_ + 1) % capacity_;
    std::copy(s.begin(), s.end(), states_.begin() + i * input_);
    action_[i] = a;
    reward_[i] = r;
    done_[i] = done ? 1 : 0;
    std::fill(next_.begin() + i * input_, next_.begin() + (i + 1) * input_, 0.0f);
    std::fill(masks_.begin() + i * actions_, masks_.begin() + (i + 1) * actions_, 0);
    if (!done) {
      std::copy(next.begin(), next.end(), next_.begin() + i * input_);
      for (Action x : next_legal) masks_[i * actions_ + x.Id(config)] = 1;
    }
  }

  std::int64_t size() const { return size_; }
  const float* state(std::int64_t i) const { return &states_[i * input_]; }
  const float* next(std::int64_t i) const { return &next_[i * input_]; }
  const std::uint8_t* mask(std::int64_t i) const { return &masks_[i * actions_]; }
  int action(std::int64_t i) const { return action_[i]; }
  float reward(std::int64_t i) const { return reward_[i]; }
  bool done(std::int64_t i) const { return done_[i] != 0; }

 private:
  std::int64_t capacity_;
  int input_;
  int actions_;
  std::int64_t size_ = 0;
  std::int64_t head_ = 0;
  std::vector<float> states_;
  std::vector<float> next_;
  std::vector<std::uint8_t> masks_;
  std::vector<int> action_;
  std::vector<float> reward_;
  std::vector<std::uint8_t> done_;
};

// Batched play of the non-exploiter seats.
class OpponentDriver {
 public:
  OpponentDriver(const PolicyOracle& oracle, int exploiter)
      : oracle_(oracle), exploiter_(exploiter) {}

  // Plays opponent moves until every state is resolved or at the exploiter.
  void Advance(std::vector<RoundState*>& states,
               std::vector<std::mt19937_64*>& gens) const {
    std::vector<std::size_t> waiting;
    std::vector<Observation> obs;
    while (true) {
      waiting.clear();
      obs.clear();
      for (std::size_t k = 0; k < states.size(); ++k) {
        RoundState& s = *states[k];
        if (s.IsResolved() || s.to_act() == exploiter_) continue;
        waiting.push_back(k);
        obs.push_back(MakeObservation(s, s.to_act()));
      }
      if (waiting.empty()) return;
      const auto dists = oracle_.Distributions(obs);
      for (std::size_t w = 0; w < waiting.size(); ++w) {
        const std::size_t k = waiting[w];
        const int id = SampleIndex(dists[w], UniformUnit(*gens[k]));
        if (id < 0) throw NumericalError("opponent policy has empty support");
        states[k]->ApplyAction(Action::FromId(oracle_.config(), id));
      }
    }
  }

 private:
  const PolicyOracle& oracle_;
  int exploiter_;
};

int GreedyAction(const float* q, const std::vector<Action>& legal,
                 const GameConfig& config) {
  int best = -1;
  for (Action a : legal) {
    const int id = a.Id(config);
    if (best < 0 || q[id] > q[best]) best = id;
  }
  return best;
}

class DqnRunner {
 public:
  DqnRunner(const BRConfig& config, const PolicyOracle& opponent)
      : config_(config),
        game_(opponent.config()),
        spec_{game_, EncodingMode::kCanonicalCounts},
        driver_(opponent, config.position),
        q_(spec_.InputSize(), config.hidden, game_.NumActions()),
        replay_(config.replay_capacity, spec_.InputSize(), game_.NumActions()),
        gen_(DeriveSeed(config.seed, 0xD0)) {
    config.Validate(game_);
    q_.InitUniformFanIn(DeriveSeed(config.seed, 0x1417));
    target_ = q_;
  }

  BRScoreSeries Run(const std::function<void(const BRScorePoint&)>& on_eval) {
    BRScoreSeries series;
    series.position = config_.position;
    const int n = config_.games_per_step;
    slots_.resize(n);
    for (int k = 0; k < n; ++k) {
      slots_[k].gen.seed(DeriveSeed(config_.seed, 0x5107, k));
      Redeal(k);
    }
    std::deque<BRScorePoint> window;
    for (std::int64_t step = 1; step <= config_.steps; ++step) {
      AdvanceToDecisions();
      Act(config_.EpsilonAt(step - 1));
      if (replay_.size() >= std::max<std::int64_t>(config_.min_replay, n)) {
        Learn();
      }
      if (step % config_.target_sync == 0) target_ = q_;
      if (step % config_.eval_every == 0) {
        BRScorePoint p = Evaluate(step / config_.eval_every);
        p.step = step;
        window.push_back(p);
        if (static_cast<int>(window.size()) > config_.rolling_window) {
          window.pop_front();
        }
        double sum = 0.0, var = 0.0;
        for (const BRScorePoint& w : window) {
          sum += w.score;
          var += w.standard_error * w.standard_error;
        }
        const double count = static_cast<double>(window.size());
        p.rolling = sum / count;
        p.rolling_standard_error = std::sqrt(var) / count;
        series.points.push_back(p);
        if (on_eval) on_eval(p);
      }
    }
    return series;
  }

 private:
  struct Slot {
    std::optional<RoundState> state;
    std::mt19937_64 gen;
    std::uint64_t deals = 0;
    bool pending = false;
    std::vector<float> pending_features;
    int pending_action = 0;
  };

  void Redeal(int k) {
    Slot& s = slots_[k];
    s.state.emplace(RoundState::Deal(
        game_, DeriveSeed(DeriveSeed(config_.seed, 0xDEA1, k), s.deals++), 0));
  }

  std::vector<float> Features(const RoundState& s) const {
    return EncodeObservation(MakeObservation(s, config_.position), spec_);
  }

  // Settles finished rounds into the replay buffer until every slot waits on
  // the exploiter.
  void AdvanceToDecisions() {
    const int n = static_cast<int>(slots_.size());
    while (true) {
      std::vector<RoundState*> states;
      std::vector<std::mt19937_64*> gens;
      for (Slot& s : slots_) {
        states.push_back(&*s.state);
        gens.push_back(&s.gen);
      }
      driver_.Advance(states, gens);
      bool redealt = false;
      for (int k = 0; k < n; ++k) {
        Slot& s = slots_[k];
        if (!s.state->IsResolved()) continue;
        if (s.pending) {
          replay_.Add(s.pending_features, s.pending_action,
                      static_cast<float>(s.state->payouts()[config_.position]),
                      true, {}, {}, game_);
          s.pending = false;
        }
        Redeal(k);
        redealt = true;
      }
      if (!redealt) return;
    }
  }

  void Act(double epsilon) {
    const int n = static_cast<int>(slots_.size());
    Eigen::MatrixXf features(spec_.InputSize(), n);
    std::vector<std::vector<float>> feats(n);
    for (int k = 0; k < n; ++k) {
      feats[k] = Features(*slots_[k].state);
      std::copy(feats[k].begin(), feats[k].end(), features.col(k).data());
    }
    QNet::Activations act;
    q_.Forward(features, &act);
    for (int k = 0; k < n; ++k) {
      Slot& s = slots_[k];
      const std::vector<Action> legal = s.state->LegalActions();
      if (s.pending) {
        replay_.Add(s.pending_features, s.pending_action, 0.0f, false,
                    feats[k], legal, game_);
      }
      int id;
      if (UniformUnit(gen_) < epsilon) {
        id = legal[gen_() % legal.size()].Id(game_);
      } else {
        id = GreedyAction(act.logits.col(k).data(), legal, game_);
      }
      s.pending = true;
      s.pending_features = std::move(feats[k]);
      s.pending_action = id;
      s.state->ApplyAction(config_.position, Action::FromId(game_, id));
    }
  }

  void Learn() {
    const int b = config_.games_per_step;
    const int input = spec_.InputSize();
    const int actions = game_.NumActions();
    Eigen::MatrixXf s(input, b), next(input, b);
    std::vector<std::int64_t> idx(b);
    for (int j = 0; j < b; ++j) {
      idx[j] = static_cast<std::int64_t>(gen_() % replay_.size());
      std::copy(replay_.state(idx[j]), replay_.state(idx[j]) + input,
                s.col(j).data());
      std::copy(replay_.next(idx[j]), replay_.next(idx[j]) + input,
                next.col(j).data());
    }
    QNet::Activations cur, tgt;
    q_.Forward(s, &cur);
    target_.Forward(next, &tgt);
    QNet::Matrix dq = QNet::Matrix::Zero(actions, b);
    QNet::RowVector dv = QNet::RowVector::Zero(b);
    for (int j = 0; j < b; ++j) {
      double y = replay_.reward(idx[j]);
      if (!replay_.done(idx[j])) {
        const std::uint8_t* mask = replay_.mask(idx[j]);
        double best = -INFINITY;
        for (int a = 0; a < actions; ++a) {
          if (mask[a]) best = std::max(best, double{tgt.logits(a, j)});
        }
        y += best;
      }
      const int a = replay_.action(idx[j]);
      const double diff = double{cur.logits(a, j)} - y;
      const double g = std::clamp(diff, -config_.huber_delta, config_.huber_delta);
      dq(a, j) = static_cast<float>(g / b);
    }
    QNet grads = q_.ZerosLike();
    q_.Backward(s, cur, dq, dv, &grads);
    double sq = 0.0;
    grads.ForEachBlock([&](std::span<const float> blk) {
      for (float x : blk) sq += double{x} * x;
    });
    const double norm = std::sqrt(sq);
    if (!std::isfinite(norm)) throw NumericalError("non-finite DQN gradient");
    double scale = config_.learning_rate;
    if (config_.max_grad_norm > 0.0 && norm > config_.max_grad_norm) {
      scale *= config_.max_grad_norm / norm;
    }
    std::vector<std::span<const float>> gblocks;
    grads.ForEachBlock([&](std::span<const float> blk) { gblocks.push_back(blk); });
    std::size_t block = 0;
    const float fscale = static_cast<float>(scale);
    q_.ForEachBlock([&](std::span<float> p) {
      const std::span<const float> g = gblocks[block++];
      for (std::size_t i = 0; i < p.size(); ++i) p[i] -= fscale * g[i];
    });
  }

  // Each evaluation point plays fresh deals.
  BRScorePoint Evaluate(std::int64_t index) const {
    const int n = config_.eval_rounds;
    std::vector<RoundState> states;
    std::vector<std::mt19937_64> gen_store;
    states.reserve(n);
    gen_store.reserve(n);
    for (int k = 0; k < n; ++k) {
      states.push_back(
          RoundState::Deal(game_, DeriveSeed(DeriveSeed(config_.seed, 0xE7A1, index), k), 0));
      gen_store.emplace_back(DeriveSeed(DeriveSeed(config_.seed, 0xE7A2, index), k));
    }
    std::vector<RoundState*> ptrs;
    std::vector<std::mt19937_64*> gens;
    for (int k = 0; k < n; ++k) {
      ptrs.push_back(&states[k]);
      gens.push_back(&gen_store[k]);
    }
    while (true) {
      driver_.Advance(ptrs, gens);
      std::vector<int> live;
      for (int k = 0; k < n; ++k) {
        if (!states[k].IsResolved()) live.push_back(k);
      }
      if (live.empty()) break;
      Eigen::MatrixXf features(spec_.InputSize(), static_cast<Eigen::Index>(live.size()));
      for (std::size_t j = 0; j < live.size(); ++j) {
        const std::vector<float> f = Features(states[live[j]]);
        std::copy(f.begin(), f.end(), features.col(j).data());
      }
      QNet::Activations act;
      q_.Forward(features, &act);
      for (std::size_t j = 0; j < live.size(); ++j) {
        RoundState& s = states[live[j]];
        const int id = GreedyAction(act.logits.col(j).data(), s.LegalActions(), game_);
        s.ApplyAction(config_.position, Action::FromId(game_, id));
      }
    }
    double sum = 0.0, sq = 0.0;
    for (const RoundState& s : states) {
      const double x = s.payouts()[config_.position];
      sum += x;
      sq += x * x;
    }
    BRScorePoint p;
    p.score = sum / n;
    const double var = n > 1 ? (sq - n * p.score * p.score) / (n - 1) : 0.0;
    p.standard_error = std::sqrt(std::max(0.0, var) / n);
    return p;
  }

  BRConfig config_;
  GameConfig game_;
  EncodingSpec spec_;
  OpponentDriver driver_;
  QNet q_;
  QNet target_;
  Replay replay_;
  std::mt19937_64 gen_;
  std::vector<Slot> slots_;
};

}  // namespace

BRScoreSeries TrainDqnBestResponse(
    const BRConfig& config, std::shared_ptr<const PolicyOracle> opponent,
    const std::function<void(const BRScorePoint&)>& on_eval) {
  if (!opponent) throw InvalidArgument("best response needs an opponent policy");
  DqnRunner runner(config, *opponent);
  return runner.Run(on_eval);
}

BRScoreSeries TrainDqnBestResponse(
    const BRConfig& config, const GameConfig& game,
    const std::function<void(const BRScorePoint&)>& on_eval) {
  auto net = std::make_shared<const PolicyNetwork>(
      LoadCheckpointFor(config.checkpoint, game));
  return TrainDqnBestResponse(
      config, std::make_shared<NetworkPolicyOracle>(std::move(net), true),
      on_eval);
}

void WriteScoreSeries(const BRScoreSeries& series, std::ostream& out) {
  out << "position,step,score,standard_error,rolling,rolling_standard_error\n";
  for (const BRScorePoint& p : series.points) {
    out << series.position << "," << p.step << "," << p.score << ","
        << p.standard_error << "," << p.rolling << ","
        << p.rolling_standard_error << "\n";
  }
}

}  // namespace liars_poker
