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

#ifndef LIARS_POKER_OBSERVATION_H_
#define LIARS_POKER_OBSERVATION_H_

#include <optional>
#include <vector>

#include "liars_poker/engine.h"

namespace liars_poker {

// What one seat can see: its own hand and the public record of the round.
struct Observation {
  GameConfig config;
  Hand own_hand;
  int player = 0;
  int opener = 0;
  std::optional<StandingBid> standing_bid;
  int consecutive_challenges = 0;
  Phase phase = Phase::kBidding;
  std::vector<HistoryEntry> history;
  int to_act = 0;
  // Empty once resolved.
  std::vector<Action> legal_actions;

  bool IsMyTurn() const { return phase != Phase::kResolved && to_act == player; }
  // Seat offset from the opener, 0 for the opener.
  int RelativeSeat(int seat) const {
    return (seat - opener + config.num_players) % config.num_players;
  }
};

Observation MakeObservation(const RoundState& state, int player);

}  // namespace liars_poker

#endif  // LIARS_POKER_OBSERVATION_H_
