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

// Exact combinatorics of Liar's Poker: bid probabilities, canonical hand
// counts, and the size and depth of the bidding tree.

#ifndef LIARS_POKER_COMBINATORICS_H_
#define LIARS_POKER_COMBINATORICS_H_

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "liars_poker/engine.h"

namespace liars_poker {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// P(S_r >= q | own count y of rank r): the other (L-1)*H digits each hit r
// with probability 1/D, so this is a Binomial((L-1)H, 1/D) upper tail at
// q - y. Exactly 1 when q <= y; 0 when q - y exceeds (L-1)H. y is clamped to
// [0, H].
Rational BidHoldsProbabilityExact(const GameConfig& config, Bid bid,
                                  int own_count);
double BidHoldsProbability(const GameConfig& config, Bid bid, int own_count);

struct CanonicalHandCount {
  BigInt per_player;  // C(H+D-1, H)
  BigInt joint;       // per_player^L
};
CanonicalHandCount CountCanonicalHands(const GameConfig& config);

// All canonical hands (count vectors) with their multinomial probability
// under uniform i.i.d. digits. Ordered by ascending lexicographic counts.
struct WeightedHand {
  Hand hand;
  double probability = 0.0;
};
std::vector<WeightedHand> EnumerateCanonicalHands(const GameConfig& config);
// All D^H ordered hands, each with probability D^-H.
std::vector<WeightedHand> EnumerateOrderedHands(const GameConfig& config);

// Number of distinct terminal action sequences of a round and the length of
// the longest one. Explicit count decisions are sequence elements; forced
// counts (challenged rebid, maximal bid) are not. The longest sequence never
// ends in an explicit count, so max_round_length counts only bids and
// challenges.
struct SequenceStats {
  BigInt sequences;
  int max_round_length = 0;
};

// Memoized DP over (standing bid, rebid flag, consecutive challenges, phase).
SequenceStats CountBidSequences(const GameConfig& config);
int MaxRoundLength(const GameConfig& config);

// Brute-force depth-first enumeration through RoundState itself. Exponential;
// intended for configs with a handful of bids.
SequenceStats EnumerateBidSequencesByEngine(const GameConfig& config);
// Same walk through RoundState, with subtrees shared between states whose
// phase, standing bid, challenge run and seat to act agree. Exact because
// transitions never read the history.
SequenceStats EnumerateBidSequencesByEngineShared(const GameConfig& config);

// Length of the repeated (bid, L-1 challenges, rebid) path up to the maximal
// bid: floor(N/2)(L+1) + (N mod 2). Not the longest legal round for L >= 3.
int RebidCyclePathLength(const GameConfig& config);

// floor(log10(x)) for x >= 1.
int Log10Floor(const BigInt& x);
double Log10(const BigInt& x);

struct StateSpaceRow {
  GameConfig config;
  BigInt canonical_hands;  // joint
  BigInt bid_sequences;
  int max_round_length = 0;
  int canonical_hands_exponent = 0;  // floor(log10)
  int bid_sequences_exponent = 0;    // floor(log10)
  int state_space_exponent = 0;      // round(log10(hands * sequences))
  int rebid_cycle_length = 0;        // RebidCyclePathLength, informational
};

std::vector<StateSpaceRow> StateSpaceReport(
    const std::vector<GameConfig>& configs);

enum class TableFormat { kTable, kCsv };
void WriteStateSpaceTable(const std::vector<StateSpaceRow>& rows,
                          TableFormat format, std::ostream& out);

// Rows y = 0..H, columns q = 1..H*L, entries P(S_r >= q | y). Rank does not
// enter the probability.
std::vector<std::vector<double>> BidProbabilityTable(const GameConfig& config);
void WriteProbabilityTable(const GameConfig& config, TableFormat format,
                           std::ostream& out);

// Copies of the modal rank (1 = mixed, 2 = pair, 3 = trips for H = 3).
inline int HandCategory(const Hand& hand) { return hand.MaxMultiplicity(); }

}  // namespace liars_poker

#endif  // LIARS_POKER_COMBINATORICS_H_
