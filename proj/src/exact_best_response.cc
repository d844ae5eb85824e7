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

#include "liars_poker/bestresponse.h"
#include "liars_poker/errors.h"

namespace liars_poker {

std::vector<std::vector<double>> UniformPolicyOracle::Distributions(
    const std::vector<Observation>& observations) const {
  std::vector<std::vector<double>> out;
  out.reserve(observations.size());
  for (const Observation& obs : observations) {
    std::vector<double> p(config_.NumActions(), 0.0);
    for (Action a : obs.legal_actions) {
      p[a.Id(config_)] = 1.0 / static_cast<double>(obs.legal_actions.size());
    }
    out.push_back(std::move(p));
  }
  return out;
}

NetworkPolicyOracle::NetworkPolicyOracle(
    std::shared_ptr<const PolicyNetwork> network, bool filter)
    : network_(std::move(network)), filter_(filter) {
  if (!network_) throw InvalidArgument("oracle needs a network");
}

std::vector<std::vector<double>> NetworkPolicyOracle::Distributions(
    const std::vector<Observation>& observations) const {
  const EncodingSpec& spec = network_->encoding();
  Eigen::MatrixXf features(spec.InputSize(),
                           static_cast<Eigen::Index>(observations.size()));
  for (std::size_t k = 0; k < observations.size(); ++k) {
    EncodeObservationInto(
        observations[k], spec,
        std::span<float>(features.col(k).data(), features.rows()));
  }
  PolicyNetwork::Mlp::Activations act;
  network_->ForwardBatch(features, &act);
  std::vector<std::vector<double>> out;
  out.reserve(observations.size());
  for (std::size_t k = 0; k < observations.size(); ++k) {
    std::vector<double> raw = MaskedSoftmax(
        std::span<const float>(act.logits.col(k).data(), act.logits.rows()),
        observations[k].legal_actions, spec.config);
    if (!filter_) {
      out.push_back(std::move(raw));
      continue;
    }
    std::vector<double> filtered = ApplyPlayFilter(raw);
    const int best = ArgmaxIndex(filtered);
    if (best < 0 || filtered[best] <= 0.0) {
      filtered.assign(raw.size(), 0.0);
      filtered[ArgmaxIndex(raw)] = 1.0;
    }
    out.push_back(std::move(filtered));
  }
  return out;
}

namespace {

class ExactSolver {
 public:
  ExactSolver(const PolicyOracle& policy, int position)
      : policy_(policy),
        config_(policy.config()),
        responder_(position),
        opponent_(1 - position) {
    hands_ = policy.DependsOnDigitOrder() ? EnumerateOrderedHands(config_)
                                          : EnumerateCanonicalHands(config_);
  }

  ExactBestResponseResult Solve() {
    std::vector<Hand> placeholder(2, hands_.front().hand);
    RoundState root(config_, placeholder, 0);
    std::vector<double> reach(hands_.size());
    for (std::size_t j = 0; j < hands_.size(); ++j) {
      reach[j] = hands_[j].probability;
    }
    ExactBestResponseResult result;
    result.value_by_hand = Visit(root, reach);
    result.hands = hands_;
    // value_by_hand[i] holds sum_j P(j) * payoff(i, j).
    for (std::size_t i = 0; i < hands_.size(); ++i) {
      result.value += hands_[i].probability * result.value_by_hand[i];
    }
    result.nodes = nodes_;
    return result;
  }

 private:
  std::vector<double> Visit(const RoundState& state,
                            const std::vector<double>& reach) {
    ++nodes_;
    const std::size_t m = hands_.size();
    if (state.IsResolved()) return Terminal(state, reach);
    const std::vector<Action> legal = state.LegalActions();
    if (state.to_act() == responder_) {
      std::vector<double> best(m, -INFINITY);
      for (Action a : legal) {
        const std::vector<double> child = Visit(state.Child(a), reach);
        for (std::size_t i = 0; i < m; ++i) best[i] = std::max(best[i], child[i]);
      }
      return best;
    }

    const Observation base = MakeObservation(state, opponent_);
    std::vector<Observation> batch;
    std::vector<std::size_t> live;
    for (std::size_t j = 0; j < m; ++j) {
      if (reach[j] <= 0.0) continue;
      Observation obs = base;
      obs.own_hand = hands_[j].hand;
      batch.push_back(std::move(obs));
      live.push_back(j);
    }
    const std::vector<std::vector<double>> dists = policy_.Distributions(batch);
    for (const auto& d : dists) CheckDistribution(d, legal);

    std::vector<double> value(m, 0.0);
    std::vector<double> child_reach(m);
    for (Action a : legal) {
      const int id = a.Id(config_);
      std::fill(child_reach.begin(), child_reach.end(), 0.0);
      bool any = false;
      for (std::size_t k = 0; k < live.size(); ++k) {
        const double w = reach[live[k]] * dists[k][id];
        child_reach[live[k]] = w;
        any = any || w > 0.0;
      }
      if (!any) continue;
      const std::vector<double> child = Visit(state.Child(a), child_reach);
      for (std::size_t i = 0; i < m; ++i) value[i] += child[i];
    }
    return value;
  }

  void CheckDistribution(const std::vector<double>& d,
                         const std::vector<Action>& legal) const {
    double sum = 0.0;
    for (Action a : legal) sum += d[a.Id(config_)];
    double total = 0.0;
    for (double p : d) {
      if (p < 0.0 || !std::isfinite(p)) {
        throw NumericalError("policy produced an invalid probability");
      }
      total += p;
    }
    if (std::abs(sum - 1.0) > 1e-9 || std::abs(total - sum) > 1e-12) {
      throw NumericalError("policy distribution is not normalized over legal actions");
    }
  }

  // Sum over opponent hands of reach * responder payout, per responder hand.
  std::vector<double> Terminal(const RoundState& state,
                               const std::vector<double>& reach) const {
    const CountResult& c = state.count_result();
    const int r = c.final_bid.rank;
    const int q = c.final_bid.quantity;
    const bool responder_bid = c.bidder == responder_;
    const std::size_t m = hands_.size();
    std::vector<double> value(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const int own = hands_[i].hand.CountOf(r);
      double v = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        if (reach[j] <= 0.0) continue;
        const bool holds = own + hands_[j].hand.CountOf(r) >= q;
        v += reach[j] * (holds == responder_bid ? 1.0 : -1.0);
      }
      value[i] = v;
    }
    return value;
  }

  const PolicyOracle& policy_;
  GameConfig config_;
  int responder_;
  int opponent_;
  std::vector<WeightedHand> hands_;
  std::int64_t nodes_ = 0;
};

}  // namespace

ExactBestResponseResult ExactBestResponse(const PolicyOracle& policy,
                                          int position) {
  const GameConfig& config = policy.config();
  config.Validate();
  if (config.num_players != 2) {
    throw InvalidArgument("exact best response supports two players only");
  }
  if (position != 0 && position != 1) {
    throw InvalidArgument("responder position must be 0 or 1");
  }
  return ExactSolver(policy, position).Solve();
}

}  // namespace liars_poker
