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

#ifndef LIARS_POKER_AGENTS_H_
#define LIARS_POKER_AGENTS_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "liars_poker/engine.h"
#include "liars_poker/neural.h"
#include "liars_poker/observation.h"

namespace liars_poker {

struct AgentPolicyOutput {
  // Indexed by action id; zero on illegal actions.
  std::vector<double> probabilities;
  Action action = Action::Challenge();
  std::string note;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string Name() const = 0;
  // Called only on the agent's own turn. Deterministic given the agent's
  // state, the observation and the seed.
  virtual AgentPolicyOutput Act(const Observation& obs, std::uint64_t seed) = 0;
  // Called for every seat once a round resolves.
  virtual void OnRoundEnd(const RoundState& /*resolved*/, int /*seat*/) {}
  virtual bool IsHuman() const { return false; }
};

class RandomAgent : public Agent {
 public:
  std::string Name() const override { return "random"; }
  AgentPolicyOutput Act(const Observation& obs, std::uint64_t seed) override;
};

// Greedy one-step expected value using the binomial bid probability given the
// agent's own count of the bid rank:
//   raise / rebid to b   (L-1)(2 p_b - 1)
//   challenge s          1 - 2 p_s
//   count s              (L-1)(2 p_s - 1)
// Ties go to the lowest-ranked move, with challenge/count below every raise.
class BaselineAgent : public Agent {
 public:
  std::string Name() const override { return "baseline"; }
  AgentPolicyOutput Act(const Observation& obs, std::uint64_t seed) override;

  struct MoveValue {
    Action action;
    double ev = 0.0;
  };
  // In legal-action order.
  static std::vector<MoveValue> MoveValues(const Observation& obs);
};

// Play-time filter: drop probabilities below 3%, renormalize, snap each to the
// nearest multiple of 1/32 (half up), renormalize, and repeat until nothing
// changes. Returns all zeros when nothing survives the first threshold.
inline constexpr double kPlayThreshold = 0.03;
inline constexpr int kPlayGrid = 32;
std::vector<double> ApplyPlayFilter(std::span<const double> probabilities);

class PolicyAgent : public Agent {
 public:
  PolicyAgent(std::shared_ptr<const PolicyNetwork> network, bool filter = true,
              std::string name = "policy");
  std::string Name() const override { return name_; }
  AgentPolicyOutput Act(const Observation& obs, std::uint64_t seed) override;

  const PolicyNetwork& network() const { return *network_; }
  bool filter() const { return filter_; }

 private:
  std::shared_ptr<const PolicyNetwork> network_;
  bool filter_;
  std::string name_;
};

// Seat driven from outside (terminal client, HTTP). Act throws StateError.
class HumanAgent : public Agent {
 public:
  std::string Name() const override { return "human"; }
  AgentPolicyOutput Act(const Observation& obs, std::uint64_t seed) override;
  bool IsHuman() const override { return true; }
};

// Dependencies for descriptors that need more than the config.
struct AgentContext {
  std::function<std::unique_ptr<Agent>(const std::string& profile,
                                       const GameConfig& config)>
      llm_factory;
  bool policy_filter = true;
};

// "random", "baseline", "policy:<checkpoint>", "policy-raw:<checkpoint>"
// (no play-time filter), "llm:<profile>", "human".
std::unique_ptr<Agent> MakeAgent(const std::string& descriptor,
                                 const GameConfig& config,
                                 const AgentContext& context = {});

// Index of the largest entry, lowest index on ties.
int ArgmaxIndex(std::span<const double> values);

}  // namespace liars_poker

#endif  // LIARS_POKER_AGENTS_H_
