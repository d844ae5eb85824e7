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

#ifndef LIARS_POKER_EVALUATION_H_
#define LIARS_POKER_EVALUATION_H_

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "liars_poker/agents.h"
#include "liars_poker/engine.h"

namespace liars_poker {

enum class OpenerRule {
  kRotate,               // opening agent cycles every hand
  kPreviousFinalBidder,  // last hand's final bidder opens
};
std::string OpenerRuleName(OpenerRule rule);
OpenerRule ParseOpenerRule(const std::string& name);

struct MatchSpec {
  GameConfig config;
  std::vector<std::string> agents;  // one descriptor per agent
  int hands = 1000;
  // On: agent k sits in seat (k + hand) mod L. Off: agent k sits in seat k.
  bool rotate_seats = true;
  OpenerRule opener_rule = OpenerRule::kRotate;
  std::uint64_t seed = 1;
  std::string history_path;  // empty disables the hand history

  void Validate() const;
};

struct AgentReport {
  std::string name;
  int hands = 0;
  int wins = 0;  // hands with positive payout
  double win_rate = 0.0;
  double total_equity = 0.0;
  double equity_per_100 = 0.0;
  double standard_error_per_100 = 0.0;  // 100 * sample sd / sqrt(n)
  int wins_by_bid = 0;
  int wins_by_challenge = 0;
  double win_by_bid_share = 0.0;
  double win_by_challenge_share = 0.0;
  // Indexed by hand category 1..H (entry 0 unused).
  std::vector<int> hands_by_category;
  std::vector<int> wins_by_category;
  std::vector<double> win_rate_by_category;
  int rebid_hands = 0;
  double rebid_rate = 0.0;
};

struct MatchReport {
  GameConfig config;
  std::vector<AgentReport> agents;
  int hands_requested = 0;
  int hands_played = 0;
  bool aborted = false;
  std::string abort_reason;
  std::string history_path;
};

// Throws InvalidArgument if an agent descriptor cannot be built. An LLM
// gateway outage ends the match early with aborted = true.
MatchReport RunMatch(const MatchSpec& spec, const AgentContext& context = {});
// Same, with agents supplied by the caller (spec.agents may be empty).
MatchReport RunMatch(const MatchSpec& spec,
                     std::vector<std::unique_ptr<Agent>> agents);

// Per-hand payout of each agent, accumulated into the report.
class MatchAccumulator {
 public:
  MatchAccumulator(const GameConfig& config, std::vector<std::string> names);
  // seat_of_agent[k] is agent k's seat in this hand; rebid[k] whether agent k
  // rebid during the hand.
  void Add(const RoundState& resolved, const std::vector<int>& seat_of_agent,
           const std::vector<bool>& rebid);
  MatchReport Finish() const;

 private:
  GameConfig config_;
  std::vector<AgentReport> agents_;
  std::vector<double> sum_sq_;
  int hands_ = 0;
};

// Win rate per category from revealed hands, rows = categories 1..H.
struct CategoryRow {
  int category = 0;
  int hands = 0;
  int wins = 0;
  double win_rate = 0.0;
};
std::vector<CategoryRow> BreakdownByHand(const AgentReport& agent);

enum class ReportFormat { kText, kCsv };
void WriteMatchReport(const MatchReport& report, ReportFormat format,
                      std::ostream& out);

}  // namespace liars_poker

#endif  // LIARS_POKER_EVALUATION_H_
