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

#include "liars_poker/agents.h"

#include <cmath>
#include <numeric>
#include <random>

#include "liars_poker/combinatorics.h"
#include "liars_poker/errors.h"
#include "liars_poker/rng.h"

namespace liars_poker {
namespace {

void RequireTurn(const Observation& obs) {
  if (obs.legal_actions.empty()) {
    throw StateError("agent asked to act with no legal action");
  }
}

Action SampleAction(const Observation& obs, const std::vector<double>& probs,
                    std::uint64_t seed) {
  std::mt19937_64 gen(MixSeed(seed));
  const int id = SampleIndex(probs, UniformUnit(gen));
  if (id < 0) throw NumericalError("empty action distribution");
  return Action::FromId(obs.config, id);
}

// Round half up, with a small allowance so a value that is a half-integer up to
// floating-point error is treated as one.
long long RoundHalfUp(double x) {
  return static_cast<long long>(std::floor(x + 0.5 + 1e-9));
}

}  // namespace

int ArgmaxIndex(std::span<const double> values) {
  int best = -1;
  for (int i = 0; i < static_cast<int>(values.size()); ++i) {
    if (best < 0 || values[i] > values[best]) best = i;
  }
  return best;
}

AgentPolicyOutput RandomAgent::Act(const Observation& obs, std::uint64_t seed) {
  RequireTurn(obs);
  AgentPolicyOutput out;
  out.probabilities.assign(obs.config.NumActions(), 0.0);
  const double p = 1.0 / static_cast<double>(obs.legal_actions.size());
  for (Action a : obs.legal_actions) out.probabilities[a.Id(obs.config)] = p;
  out.action = SampleAction(obs, out.probabilities, seed);
  return out;
}

std::vector<BaselineAgent::MoveValue> BaselineAgent::MoveValues(
    const Observation& obs) {
  const GameConfig& c = obs.config;
  const double opponents = c.num_players - 1;
  auto holds = [&](int index) {
    const Bid bid = BidOfIndex(c, index);
    return BidHoldsProbability(c, bid, obs.own_hand.CountOf(bid.rank));
  };
  std::vector<MoveValue> values;
  for (Action a : obs.legal_actions) {
    double ev;
    if (a.is_bid()) {
      ev = opponents * (2.0 * holds(a.bid_index()) - 1.0);
    } else {
      const double ps = holds(obs.standing_bid->index);
      ev = obs.phase == Phase::kBidderDecision ? opponents * (2.0 * ps - 1.0)
                                               : 1.0 - 2.0 * ps;
    }
    values.push_back({a, ev});
  }
  return values;
}

AgentPolicyOutput BaselineAgent::Act(const Observation& obs,
                                     std::uint64_t /*seed*/) {
  RequireTurn(obs);
  constexpr double kTie = 1e-12;
  const std::vector<MoveValue> values = MoveValues(obs);
  // Rank order: challenge/count first, then bids ascending.
  std::vector<const MoveValue*> ranked;
  for (const MoveValue& v : values) {
    if (v.action.is_challenge()) ranked.push_back(&v);
  }
  for (const MoveValue& v : values) {
    if (v.action.is_bid()) ranked.push_back(&v);
  }
  const MoveValue* best = ranked.front();
  for (const MoveValue* v : ranked) {
    if (v->ev > best->ev + kTie) best = v;
  }
  AgentPolicyOutput out;
  out.probabilities.assign(obs.config.NumActions(), 0.0);
  out.probabilities[best->action.Id(obs.config)] = 1.0;
  out.action = best->action;
  out.note = "ev=" + std::to_string(best->ev);
  return out;
}

std::vector<double> ApplyPlayFilter(std::span<const double> probabilities) {
  const std::size_t n = probabilities.size();
  std::vector<double> out(n, 0.0);
  double kept = 0.0;
  for (double p : probabilities) {
    if (p >= kPlayThreshold) kept += p;
  }
  if (kept <= 0.0) return out;

  std::vector<long long> units(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (probabilities[i] >= kPlayThreshold) {
      units[i] = RoundHalfUp(probabilities[i] / kept * kPlayGrid);
    }
  }
  // Integer passes on the weights units[i] / total until they stop changing.
  for (int pass = 0; pass < 64; ++pass) {
    long long total = std::accumulate(units.begin(), units.end(), 0LL);
    std::vector<long long> next(n, 0);
    long long survivors = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (units[i] > 0 &&
          static_cast<double>(units[i]) / static_cast<double>(total) >=
              kPlayThreshold) {
        survivors += units[i];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (units[i] > 0 &&
          static_cast<double>(units[i]) / static_cast<double>(total) >=
              kPlayThreshold) {
        next[i] = (2 * kPlayGrid * units[i] + survivors) / (2 * survivors);
      }
    }
    if (next == units) break;
    units = std::move(next);
  }
  const long long total = std::accumulate(units.begin(), units.end(), 0LL);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<double>(units[i]) / static_cast<double>(total);
  }
  return out;
}

PolicyAgent::PolicyAgent(std::shared_ptr<const PolicyNetwork> network,
                         bool filter, std::string name)
    : network_(std::move(network)), filter_(filter), name_(std::move(name)) {
  if (!network_) throw InvalidArgument("policy agent needs a network");
}

AgentPolicyOutput PolicyAgent::Act(const Observation& obs, std::uint64_t seed) {
  RequireTurn(obs);
  AgentPolicyOutput out;
  const std::vector<double> raw = network_->PolicyFor(obs);
  if (!filter_) {
    out.probabilities = raw;
  } else {
    out.probabilities = ApplyPlayFilter(raw);
    if (ArgmaxIndex(out.probabilities) < 0 ||
        out.probabilities[ArgmaxIndex(out.probabilities)] <= 0.0) {
      const int best = ArgmaxIndex(raw);
      out.probabilities.assign(raw.size(), 0.0);
      out.probabilities[best] = 1.0;
      out.note = "argmax fallback";
    }
  }
  out.action = SampleAction(obs, out.probabilities, seed);
  return out;
}

AgentPolicyOutput HumanAgent::Act(const Observation&, std::uint64_t) {
  throw StateError("human seats act through the play service");
}

std::unique_ptr<Agent> MakeAgent(const std::string& descriptor,
                                 const GameConfig& config,
                                 const AgentContext& context) {
  const auto colon = descriptor.find(':');
  const std::string kind = descriptor.substr(0, colon);
  const std::string arg =
      colon == std::string::npos ? "" : descriptor.substr(colon + 1);
  if (kind == "random" && arg.empty()) return std::make_unique<RandomAgent>();
  if (kind == "baseline" && arg.empty()) {
    return std::make_unique<BaselineAgent>();
  }
  if (kind == "human" && arg.empty()) return std::make_unique<HumanAgent>();
  if ((kind == "policy" || kind == "policy-raw") && !arg.empty()) {
    auto net = std::make_shared<const PolicyNetwork>(
        LoadCheckpointFor(arg, config));
    const bool filter = kind == "policy" && context.policy_filter;
    return std::make_unique<PolicyAgent>(std::move(net), filter, descriptor);
  }
  if (kind == "llm" && !arg.empty()) {
    if (!context.llm_factory) {
      throw InvalidArgument("no LLM profiles configured for '" + descriptor +
                            "'");
    }
    return context.llm_factory(arg, config);
  }
  throw InvalidArgument("unknown agent descriptor '" + descriptor + "'");
}

}  // namespace liars_poker
