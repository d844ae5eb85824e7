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

// Rules engine for parameterized Liar's Poker: H digits per hand drawn
// uniformly from ranks 1..D, L players, bids (q, r) claiming that rank r
// appears at least q times across all hands.
//
// A round proceeds clockwise. The opener must bid. Each later player either
// raises or challenges. When a bid has been challenged by all L-1 other
// players the bidder either counts or rebids once; a challenged rebid is
// counted without a further decision. Making the maximal bid (H*L, D) ends the
// round with an immediate count. The winner of a count collects one unit from
// every opponent.

#ifndef LIARS_POKER_ENGINE_H_
#define LIARS_POKER_ENGINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace liars_poker {

struct GameConfig {
  int hand_length = 3;        // H
  int digit_cardinality = 3;  // D
  int num_players = 2;        // L

  int MaxQuantity() const { return hand_length * num_players; }
  int NumBids() const { return MaxQuantity() * digit_cardinality; }
  // Bids plus the challenge slot.
  int NumActions() const { return NumBids() + 1; }
  int ChallengeActionId() const { return NumBids(); }

  // Throws InvalidArgument unless H >= 1, D >= 1, L >= 2.
  void Validate() const;

  // "3x3 2-player".
  std::string ToString() const;
  // "3x3x2"; accepted back by ParseGameConfig.
  std::string ShortName() const;

  friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

// Parses "HxDxL" (e.g. "3x3x2").
GameConfig ParseGameConfig(const std::string& text);

struct Bid {
  int quantity = 1;  // q in [1, H*L]
  int rank = 1;      // r in [1, D]

  friend bool operator==(const Bid&, const Bid&) = default;
};

// Dense index (q-1)*D + (r-1). Index order coincides with bid strength.
int IndexOfBid(const GameConfig& config, Bid bid);
Bid BidOfIndex(const GameConfig& config, int index);
// "4 2s"-style rendering is left to callers; this gives "(4,2)".
std::string BidToString(Bid bid);

// Either a bid (by dense index) or a challenge. In the bidder's decision the
// challenge slot means "count".
class Action {
 public:
  static Action MakeBid(int bid_index) { return Action(bid_index); }
  static Action Challenge() { return Action(kChallengeTag); }
  // Encoded id in [0, num_bids]; num_bids is the challenge.
  static Action FromId(const GameConfig& config, int id);

  bool is_challenge() const { return bid_index_ == kChallengeTag; }
  bool is_bid() const { return !is_challenge(); }
  int bid_index() const;
  int Id(const GameConfig& config) const {
    return is_challenge() ? config.ChallengeActionId() : bid_index_;
  }
  // "BID q r" or "CHALLENGE".
  std::string ToString(const GameConfig& config) const;

  friend bool operator==(const Action&, const Action&) = default;

 private:
  static constexpr int kChallengeTag = -1;
  explicit Action(int bid_index) : bid_index_(bid_index) {}
  int bid_index_;
};

// A private hand. Keeps the dealt digit order (used by the explicit-digit
// encoding) alongside the per-rank counts.
class Hand {
 public:
  Hand() = default;
  // Digits in 1..D. Throws InvalidArgument on out-of-range digits.
  static Hand FromDigits(const GameConfig& config, std::vector<int> digits);
  // counts[r-1] copies of rank r; digits are listed in ascending order.
  // Throws InvalidArgument unless counts has D entries summing to H.
  static Hand FromCounts(const GameConfig& config, std::vector<int> counts);

  const std::vector<int>& counts() const { return counts_; }
  const std::vector<int>& digits() const { return digits_; }
  int CountOf(int rank) const { return counts_.at(rank - 1); }
  // Copies of the most common rank: 1 = all distinct, ..., H = all same.
  int MaxMultiplicity() const;

  friend bool operator==(const Hand&, const Hand&) = default;

 private:
  std::vector<int> counts_;
  std::vector<int> digits_;
};

// Deals L hands, each digit i.i.d. uniform over 1..D.
std::vector<Hand> DealHands(const GameConfig& config, std::uint64_t seed);

enum class Phase { kBidding, kBidderDecision, kResolved };
std::string PhaseName(Phase phase);

struct StandingBid {
  int index = 0;
  int bidder = 0;
  bool is_rebid = false;

  friend bool operator==(const StandingBid&, const StandingBid&) = default;
};

struct HistoryEntry {
  int player = 0;
  Action action = Action::Challenge();

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

enum class WinnerSide { kBidder, kChallengers };

struct CountResult {
  std::vector<int> totals;  // totals[r-1] = copies of rank r over all hands
  Bid final_bid;
  int bidder = 0;
  bool bid_holds = false;
  WinnerSide winner_side = WinnerSide::kBidder;
};

// Full state of one round. Values are cheap to copy; transitions are pure
// functions of (state, action).
class RoundState {
 public:
  // Throws InvalidArgument on a bad config, wrong number of hands, a hand
  // whose counts do not match the config, or an opener out of range.
  RoundState(GameConfig config, std::vector<Hand> hands, int opener);
  static RoundState Deal(const GameConfig& config, std::uint64_t seed,
                         int opener);

  const GameConfig& config() const { return config_; }
  const std::vector<Hand>& hands() const { return hands_; }
  const Hand& hand(int player) const { return hands_.at(player); }
  int opener() const { return opener_; }
  Phase phase() const { return phase_; }
  bool IsResolved() const { return phase_ == Phase::kResolved; }
  const std::optional<StandingBid>& standing_bid() const {
    return standing_bid_;
  }
  int consecutive_challenges() const { return consecutive_challenges_; }
  // Seat to act. In the bidder's decision this is the challenged bidder.
  int to_act() const { return to_act_; }
  const std::vector<HistoryEntry>& history() const { return history_; }

  // Number of bids and challenges so far; an explicit count decision is
  // recorded in history() but not counted here.
  int RoundLength() const;

  // Throws StateError when the round is resolved.
  std::vector<Action> LegalActions() const;
  bool IsLegal(Action action) const;

  // Throws IllegalAction for an action not in LegalActions().
  void ApplyAction(Action action);
  // Same, but also throws IllegalAction unless `player` is the seat to act.
  void ApplyAction(int player, Action action);
  RoundState Child(Action action) const;

  // Throws StateError before resolution.
  const CountResult& count_result() const;
  const std::vector<int>& payouts() const;

  // True when the bidder chose to count in the bidder's decision.
  bool ended_by_explicit_count() const { return explicit_count_; }

  std::string ToString() const;

 private:
  int NextSeat(int seat) const { return (seat + 1) % config_.num_players; }
  void Resolve();

  GameConfig config_;
  std::vector<Hand> hands_;
  int opener_ = 0;
  Phase phase_ = Phase::kBidding;
  std::optional<StandingBid> standing_bid_;
  int consecutive_challenges_ = 0;
  int to_act_ = 0;
  std::vector<HistoryEntry> history_;
  bool explicit_count_ = false;
  std::optional<CountResult> count_result_;
  std::vector<int> payouts_;
};

// Free-function forms of the state machine.
inline std::vector<Action> LegalActions(const RoundState& state) {
  return state.LegalActions();
}
inline RoundState ApplyAction(const RoundState& state, Action action) {
  return state.Child(action);
}
struct Resolution {
  CountResult count;
  std::vector<int> payouts;
};
Resolution ResolveCount(const RoundState& state);

// Payout vector for a count of `bid` made by `bidder` against `totals`.
std::vector<int> PayoutsForCount(const GameConfig& config, int bidder,
                                 bool bid_holds);

}  // namespace liars_poker

#endif  // LIARS_POKER_ENGINE_H_
