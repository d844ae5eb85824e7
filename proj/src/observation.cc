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

#include "liars_poker/observation.h"

#include "liars_poker/errors.h"

namespace liars_poker {

Observation MakeObservation(const RoundState& state, int player) {
  if (player < 0 || player >= state.config().num_players) {
    throw InvalidArgument("player out of range");
  }
  Observation obs;
  obs.config = state.config();
  obs.own_hand = state.hand(player);
  obs.player = player;
  obs.opener = state.opener();
  obs.standing_bid = state.standing_bid();
  obs.consecutive_challenges = state.consecutive_challenges();
  obs.phase = state.phase();
  obs.history = state.history();
  obs.to_act = state.to_act();
  if (!state.IsResolved()) obs.legal_actions = state.LegalActions();
  return obs;
}

}  // namespace liars_poker
