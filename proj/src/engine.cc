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

#include "liars_poker/engine.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>

#include "liars_poker/errors.h"
#include "liars_poker/rng.h"

namespace liars_poker {

void GameConfig::Validate() const {
  if (hand_length < 1 || digit_cardinality < 1 || num_players < 2) {
    throw InvalidArgument("invalid game config " + ShortName() +
                          ": need H >= 1, D >= 1, L >= 2");
  }
}

std::string GameConfig::ToString() const {
  std::ostringstream out;
  out << hand_length << "x" << digit_cardinality << " " << num_players
      << "-player";
  return out.str();
}

std::string GameConfig::ShortName() const {
  std::ostringstream out;
  out << hand_length << "x" << digit_cardinality << "x" << num_players;
  return out.str();
}

GameConfig ParseGameConfig(const std::string& text) {
  GameConfig config;
  char x1 = 0, x2 = 0;
  std::istringstream in(text);
  if (!(in >> config.hand_length >> x1 >> config.digit_cardinality >> x2 >>
        config.num_players) ||
      x1 != 'x' || x2 != 'x' || !in.eof()) {
    throw InvalidArgument("expected HxDxL, got '" + text + "'");
  }
  config.Validate();
  return config;
}

int IndexOfBid(const GameConfig& config, Bid bid) {
  if (bid.quantity < 1 || bid.quantity > config.MaxQuantity() ||
      bid.rank < 1 || bid.rank > config.digit_cardinality) {
    throw InvalidArgument("bid " + BidToString(bid) + " out of range for " +
                          config.ToString());
  }
  return (bid.quantity - 1) * config.digit_cardinality + (bid.rank - 1);
}

Bid BidOfIndex(const GameConfig& config, int index) {
  if (index < 0 || index >= config.NumBids()) {
    throw InvalidArgument("bid index " + std::to_string(index) +
                          " out of range for " + config.ToString());
  }
  return Bid{index / config.digit_cardinality + 1,
             index % config.digit_cardinality + 1};
}

std::string BidToString(Bid bid) {
  return "(" + std::to_string(bid.quantity) + "," + std::to_string(bid.rank) +
         ")";
}

Action Action::FromId(const GameConfig& config, int id) {
  if (id == config.ChallengeActionId()) return Challenge();
  if (id < 0 || id > config.ChallengeActionId()) {
    throw InvalidArgument("action id " + std::to_string(id) +
                          " out of range");
  }
  return MakeBid(id);
}

int Action::bid_index() const {
  if (is_challenge()) throw InvalidArgument("challenge has no bid index");
  return bid_index_;
}

std::string Action::ToString(const GameConfig& config) const {
  if (is_challenge()) return "CHALLENGE";
  Bid bid = BidOfIndex(config, bid_index_);
  return "BID " + std::to_string(bid.quantity) + " " +
         std::to_string(bid.rank);
}

Hand Hand::FromDigits(const GameConfig& config, std::vector<int> digits) {
  if (static_cast<int>(digits.size()) != config.hand_length) {
    throw InvalidArgument("hand must have " +
                          std::to_string(config.hand_length) + " digits");
  }
  Hand hand;
  hand.counts_.assign(config.digit_cardinality, 0);
  for (int d : digits) {
    if (d < 1 || d > config.digit_cardinality) {
      throw InvalidArgument("digit " + std::to_string(d) + " outside 1.." +
                            std::to_string(config.digit_cardinality));
    }
    ++hand.counts_[d - 1];
  }
  hand.digits_ = std::move(digits);
  return hand;
}

Hand Hand::FromCounts(const GameConfig& config, std::vector<int> counts) {
  if (static_cast<int>(counts.size()) != config.digit_cardinality) {
    throw InvalidArgument("hand counts must have D entries");
  }
  int total = 0;
  for (int c : counts) {
    if (c < 0) throw InvalidArgument("negative count in hand");
    total += c;
  }
  if (total != config.hand_length) {
    throw InvalidArgument("hand counts sum to " + std::to_string(total) +
                          ", expected H = " +
                          std::to_string(config.hand_length));
  }
  Hand hand;
  for (int r = 1; r <= config.digit_cardinality; ++r) {
    hand.digits_.insert(hand.digits_.end(), counts[r - 1], r);
  }
  hand.counts_ = std::move(counts);
  return hand;
}

int Hand::MaxMultiplicity() const {
  return counts_.empty() ? 0 : *std::max_element(counts_.begin(), counts_.end());
}

std::vector<Hand> DealHands(const GameConfig& config, std::uint64_t seed) {
  config.Validate();
  std::mt19937_64 gen(MixSeed(seed));
  std::vector<Hand> hands;
  hands.reserve(config.num_players);
  for (int p = 0; p < config.num_players; ++p) {
    std::vector<int> digits(config.hand_length);
    for (int& d : digits) {
      d = 1 + static_cast<int>(gen() % config.digit_cardinality);
    }
    hands.push_back(Hand::FromDigits(config, std::move(digits)));
  }
  return hands;
}

std::string PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kBidding:
      return "bidding";
    case Phase::kBidderDecision:
      return "bidder_decision";
    case Phase::kResolved:
      return "resolved";
  }
  return "unknown";
}

RoundState::RoundState(GameConfig config, std::vector<Hand> hands, int opener)
    : config_(config), hands_(std::move(hands)), opener_(opener) {
  config_.Validate();
  if (static_cast<int>(hands_.size()) != config_.num_players) {
    throw InvalidArgument("expected " + std::to_string(config_.num_players) +
                          " hands, got " + std::to_string(hands_.size()));
  }
  for (const Hand& h : hands_) {
    // Re-validate through the count constructor.
    Hand::FromCounts(config_, h.counts());
  }
  if (opener_ < 0 || opener_ >= config_.num_players) {
    throw InvalidArgument("opener out of range");
  }
  to_act_ = opener_;
}

RoundState RoundState::Deal(const GameConfig& config, std::uint64_t seed,
                            int opener) {
  return RoundState(config, DealHands(config, seed), opener);
}

int RoundState::RoundLength() const {
  return static_cast<int>(history_.size()) - (explicit_count_ ? 1 : 0);
}

std::vector<Action> RoundState::LegalActions() const {
  if (phase_ == Phase::kResolved) {
    throw StateError("no legal actions in a resolved round");
  }
  std::vector<Action> actions;
  int first = standing_bid_ ? standing_bid_->index + 1 : 0;
  actions.reserve(config_.NumBids() - first + 1);
  for (int i = first; i < config_.NumBids(); ++i) {
    actions.push_back(Action::MakeBid(i));
  }
  if (standing_bid_) actions.push_back(Action::Challenge());
  return actions;
}

bool RoundState::IsLegal(Action action) const {
  if (phase_ == Phase::kResolved) return false;
  if (action.is_challenge()) return standing_bid_.has_value();
  int index = action.bid_index();
  if (index < 0 || index >= config_.NumBids()) return false;
  return !standing_bid_ || index > standing_bid_->index;
}

void RoundState::ApplyAction(int player, Action action) {
  if (player != to_act_) {
    throw IllegalAction("seat " + std::to_string(player) +
                        " acted out of turn; seat " +
                        std::to_string(to_act_) + " is to act");
  }
  ApplyAction(action);
}

void RoundState::ApplyAction(Action action) {
  if (!IsLegal(action)) {
    throw IllegalAction("illegal action " +
                        (action.is_challenge()
                             ? std::string("CHALLENGE")
                             : "bid index " + std::to_string(action.bid_index())) +
                        " in " + ToString());
  }
  const int actor = to_act_;
  history_.push_back(HistoryEntry{actor, action});
  const bool maximal =
      action.is_bid() && action.bid_index() == config_.NumBids() - 1;

  if (phase_ == Phase::kBidderDecision) {
    if (action.is_challenge()) {
      explicit_count_ = true;
      Resolve();
      return;
    }
    standing_bid_ = StandingBid{action.bid_index(), actor, /*is_rebid=*/true};
    consecutive_challenges_ = 0;
    phase_ = Phase::kBidding;
    if (maximal) {
      Resolve();
    } else {
      to_act_ = NextSeat(actor);
    }
    return;
  }

  if (action.is_bid()) {
    standing_bid_ = StandingBid{action.bid_index(), actor, /*is_rebid=*/false};
    consecutive_challenges_ = 0;
    if (maximal) {
      Resolve();
    } else {
      to_act_ = NextSeat(actor);
    }
    return;
  }

  ++consecutive_challenges_;
  if (consecutive_challenges_ < config_.num_players - 1) {
    to_act_ = NextSeat(actor);
  } else if (standing_bid_->is_rebid) {
    Resolve();
  } else {
    phase_ = Phase::kBidderDecision;
    to_act_ = standing_bid_->bidder;
  }
}

RoundState RoundState::Child(Action action) const {
  RoundState child = *this;
  child.ApplyAction(action);
  return child;
}

void RoundState::Resolve() {
  CountResult result;
  result.totals.assign(config_.digit_cardinality, 0);
  for (const Hand& h : hands_) {
    for (int r = 0; r < config_.digit_cardinality; ++r) {
      result.totals[r] += h.counts()[r];
    }
  }
  result.final_bid = BidOfIndex(config_, standing_bid_->index);
  result.bidder = standing_bid_->bidder;
  result.bid_holds =
      result.totals[result.final_bid.rank - 1] >= result.final_bid.quantity;
  result.winner_side =
      result.bid_holds ? WinnerSide::kBidder : WinnerSide::kChallengers;
  payouts_ = PayoutsForCount(config_, result.bidder, result.bid_holds);
  count_result_ = std::move(result);
  phase_ = Phase::kResolved;
  to_act_ = -1;
}

const CountResult& RoundState::count_result() const {
  if (!count_result_) throw StateError("round not resolved");
  return *count_result_;
}

const std::vector<int>& RoundState::payouts() const {
  if (!count_result_) throw StateError("round not resolved");
  return payouts_;
}

std::string RoundState::ToString() const {
  std::ostringstream out;
  out << config_.ShortName() << " phase=" << PhaseName(phase_);
  if (standing_bid_) {
    out << " bid=" << BidToString(BidOfIndex(config_, standing_bid_->index))
        << " by " << standing_bid_->bidder
        << (standing_bid_->is_rebid ? " (rebid)" : "");
  }
  out << " challenges=" << consecutive_challenges_ << " to_act=" << to_act_
      << " history=[";
  for (std::size_t i = 0; i < history_.size(); ++i) {
    if (i) out << ", ";
    out << history_[i].player << ":" << history_[i].action.ToString(config_);
  }
  out << "]";
  return out.str();
}

Resolution ResolveCount(const RoundState& state) {
  return Resolution{state.count_result(), state.payouts()};
}

std::vector<int> PayoutsForCount(const GameConfig& config, int bidder,
                                 bool bid_holds) {
  const int sign = bid_holds ? 1 : -1;
  std::vector<int> payouts(config.num_players, -sign);
  payouts[bidder] = sign * (config.num_players - 1);
  return payouts;
}

}  // namespace liars_poker
