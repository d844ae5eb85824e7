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

#include "liars_poker/combinatorics.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <tuple>
#include <sstream>

#include "liars_poker/errors.h"

namespace liars_poker {
namespace {

BigInt Binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt result = 1;
  for (int i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;
  }
  return result;
}

BigInt Power(BigInt base, int exp) {
  BigInt result = 1;
  for (int i = 0; i < exp; ++i) result *= base;
  return result;
}

double Factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

Rational BidHoldsProbabilityExact(const GameConfig& config, Bid bid,
                                  int own_count) {
  config.Validate();
  own_count = std::clamp(own_count, 0, config.hand_length);
  const int others = (config.num_players - 1) * config.hand_length;
  const int needed = bid.quantity - own_count;
  if (needed <= 0) return Rational(1);
  if (needed > others) return Rational(0);
  const int d = config.digit_cardinality;
  BigInt numerator = 0;
  for (int k = needed; k <= others; ++k) {
    numerator += Binomial(others, k) * Power(d - 1, others - k);
  }
  return Rational(numerator, Power(d, others));
}

double BidHoldsProbability(const GameConfig& config, Bid bid, int own_count) {
  return BidHoldsProbabilityExact(config, bid, own_count).convert_to<double>();
}

CanonicalHandCount CountCanonicalHands(const GameConfig& config) {
  config.Validate();
  CanonicalHandCount count;
  count.per_player = Binomial(config.hand_length + config.digit_cardinality - 1,
                              config.hand_length);
  count.joint = Power(count.per_player, config.num_players);
  return count;
}

std::vector<WeightedHand> EnumerateCanonicalHands(const GameConfig& config) {
  config.Validate();
  const int d = config.digit_cardinality;
  const int h = config.hand_length;
  const double total = std::pow(static_cast<double>(d), h);
  std::vector<WeightedHand> out;
  std::vector<int> counts(d, 0);
  std::function<void(int, int)> fill = [&](int rank, int remaining) {
    if (rank == d - 1) {
      counts[rank] = remaining;
      double ways = Factorial(h);
      for (int c : counts) ways /= Factorial(c);
      out.push_back({Hand::FromCounts(config, counts), ways / total});
      return;
    }
    for (int c = remaining; c >= 0; --c) {
      counts[rank] = c;
      fill(rank + 1, remaining - c);
    }
  };
  fill(0, h);
  return out;
}

std::vector<WeightedHand> EnumerateOrderedHands(const GameConfig& config) {
  config.Validate();
  const int d = config.digit_cardinality;
  const int h = config.hand_length;
  const double p = std::pow(static_cast<double>(d), -h);
  std::vector<WeightedHand> out;
  std::vector<int> digits(h, 1);
  while (true) {
    out.push_back({Hand::FromDigits(config, digits), p});
    int i = h - 1;
    while (i >= 0 && digits[i] == d) digits[i--] = 1;
    if (i < 0) break;
    ++digits[i];
  }
  return out;
}

// The subtree below a state depends only on the standing bid, its rebid flag,
// the challenge counter and the phase; seat identities rotate deterministically
// and never change which actions are legal.
SequenceStats CountBidSequences(const GameConfig& config) {
  config.Validate();
  const int n = config.NumBids();
  const int l = config.num_players;

  struct Entry {
    BigInt count;
    int length = 0;
  };
  auto add_to = [](Entry& acc, const BigInt& count, int length) {
    acc.count += count;
    acc.length = std::max(acc.length, length);
  };

  // bidding[i][rebid][cc], decision[i]; only i <= n-2 can be standing.
  std::vector<std::array<std::vector<Entry>, 2>> bidding(n);
  std::vector<Entry> decision(n);
  // Suffix aggregates of "make bid b" over b >= i, for each rebid flag: the
  // count of completed sequences and the longest length including the bid.
  std::array<std::vector<Entry>, 2> suffix;
  suffix[0].assign(n + 1, Entry{});
  suffix[1].assign(n + 1, Entry{});

  auto make_bid = [&](int b, int rebid) -> Entry {
    if (b == n - 1) return Entry{1, 1};
    const Entry& child = bidding[b][rebid][0];
    return Entry{child.count, child.length + 1};
  };

  for (int i = n - 1; i >= 0; --i) {
    if (i <= n - 2) {
      // Bidder's decision after L-1 challenges of a non-rebid bid at i.
      Entry dec{1, 0};  // explicit count; not part of round length
      add_to(dec, suffix[1][i + 1].count, suffix[1][i + 1].length);
      decision[i] = dec;

      for (int rebid = 0; rebid < 2; ++rebid) {
        auto& row = bidding[i][rebid];
        row.assign(l - 1, Entry{});
        for (int cc = l - 2; cc >= 0; --cc) {
          Entry e = suffix[0][i + 1];
          if (cc + 1 < l - 1) {
            add_to(e, row[cc + 1].count, row[cc + 1].length + 1);
          } else if (rebid) {
            add_to(e, 1, 1);
          } else {
            add_to(e, decision[i].count, decision[i].length + 1);
          }
          row[cc] = std::move(e);
        }
      }
    }
    for (int rebid = 0; rebid < 2; ++rebid) {
      Entry here = make_bid(i, rebid);
      Entry acc = suffix[rebid][i + 1];
      add_to(acc, here.count, here.length);
      suffix[rebid][i] = std::move(acc);
    }
  }
  return SequenceStats{suffix[0][0].count, suffix[0][0].length};
}

int MaxRoundLength(const GameConfig& config) {
  return CountBidSequences(config).max_round_length;
}

SequenceStats EnumerateBidSequencesByEngine(const GameConfig& config) {
  config.Validate();
  std::vector<Hand> hands;
  std::vector<int> counts(config.digit_cardinality, 0);
  counts[0] = config.hand_length;
  for (int p = 0; p < config.num_players; ++p) {
    hands.push_back(Hand::FromCounts(config, counts));
  }
  SequenceStats stats;
  std::function<void(const RoundState&)> visit = [&](const RoundState& s) {
    if (s.IsResolved()) {
      stats.sequences += 1;
      stats.max_round_length = std::max(stats.max_round_length, s.RoundLength());
      return;
    }
    for (Action a : s.LegalActions()) visit(s.Child(a));
  };
  visit(RoundState(config, std::move(hands), 0));
  return stats;
}

SequenceStats EnumerateBidSequencesByEngineShared(const GameConfig& config) {
  config.Validate();
  std::vector<Hand> hands;
  std::vector<int> counts(config.digit_cardinality, 0);
  counts[0] = config.hand_length;
  for (int p = 0; p < config.num_players; ++p) {
    hands.push_back(Hand::FromCounts(config, counts));
  }
  // Sequences below a state and the longest remaining length.
  using Key = std::tuple<int, int, int, bool, int, int>;
  std::map<Key, SequenceStats> memo;
  std::function<SequenceStats(const RoundState&)> visit =
      [&](const RoundState& s) -> SequenceStats {
    if (s.IsResolved()) return {1, 0};
    const auto& bid = s.standing_bid();
    const Key key{static_cast<int>(s.phase()), bid ? bid->index : -1,
                  bid ? bid->bidder : -1, bid && bid->is_rebid,
                  s.consecutive_challenges(), s.to_act()};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    SequenceStats out;
    for (Action a : s.LegalActions()) {
      const RoundState child = s.Child(a);
      const SequenceStats below = visit(child);
      out.sequences += below.sequences;
      out.max_round_length =
          std::max(out.max_round_length, below.max_round_length +
                                             child.RoundLength() - s.RoundLength());
    }
    memo.emplace(key, out);
    return out;
  };
  return visit(RoundState(config, std::move(hands), 0));
}

int RebidCyclePathLength(const GameConfig& config) {
  const int n = config.NumBids();
  return (n / 2) * (config.num_players + 1) + n % 2;
}

int Log10Floor(const BigInt& x) {
  if (x < 1) throw InvalidArgument("log10 of a non-positive integer");
  return static_cast<int>(x.str().size()) - 1;
}

double Log10(const BigInt& x) {
  if (x < 1) throw InvalidArgument("log10 of a non-positive integer");
  const std::string digits = x.str();
  const std::size_t keep = std::min<std::size_t>(digits.size(), 17);
  const double mantissa = std::stod(digits.substr(0, keep));
  return std::log10(mantissa) + static_cast<double>(digits.size() - keep);
}

std::vector<StateSpaceRow> StateSpaceReport(
    const std::vector<GameConfig>& configs) {
  std::vector<StateSpaceRow> rows;
  for (const GameConfig& config : configs) {
    StateSpaceRow row;
    row.config = config;
    row.canonical_hands = CountCanonicalHands(config).joint;
    SequenceStats stats = CountBidSequences(config);
    row.bid_sequences = stats.sequences;
    row.max_round_length = stats.max_round_length;
    row.canonical_hands_exponent = Log10Floor(row.canonical_hands);
    row.bid_sequences_exponent = Log10Floor(row.bid_sequences);
    row.state_space_exponent = static_cast<int>(
        std::lround(Log10(row.canonical_hands) + Log10(row.bid_sequences)));
    row.rebid_cycle_length = RebidCyclePathLength(config);
    rows.push_back(std::move(row));
  }
  return rows;
}

void WriteStateSpaceTable(const std::vector<StateSpaceRow>& rows,
                          TableFormat format, std::ostream& out) {
  if (format == TableFormat::kCsv) {
    out << "game,hand_length,digit_cardinality,num_players,canonical_hands,"
           "canonical_hands_exp,bid_sequences,bid_sequences_exp,"
           "max_round_length,state_space_exp,rebid_cycle_length\n";
    for (const StateSpaceRow& r : rows) {
      out << r.config.ShortName() << "," << r.config.hand_length << ","
          << r.config.digit_cardinality << "," << r.config.num_players << ","
          << r.canonical_hands << "," << r.canonical_hands_exponent << ","
          << r.bid_sequences << "," << r.bid_sequences_exponent << ","
          << r.max_round_length << "," << r.state_space_exponent << ","
          << r.rebid_cycle_length << "\n";
    }
    return;
  }
  out << std::left << std::setw(16) << "Game" << std::setw(18)
      << "Canonical Hands" << std::setw(16) << "Bid Sequences" << std::setw(18)
      << "Max Round Length" << std::setw(13) << "State Space"
      << "Rebid Cycle\n";
  for (const StateSpaceRow& r : rows) {
    out << std::left << std::setw(16) << r.config.ToString() << std::setw(18)
        << ("10^" + std::to_string(r.canonical_hands_exponent))
        << std::setw(16) << ("10^" + std::to_string(r.bid_sequences_exponent))
        << std::setw(18) << r.max_round_length
        << std::setw(13) << ("10^" + std::to_string(r.state_space_exponent))
        << r.rebid_cycle_length << "\n";
  }
}

std::vector<std::vector<double>> BidProbabilityTable(const GameConfig& config) {
  std::vector<std::vector<double>> table;
  for (int y = 0; y <= config.hand_length; ++y) {
    std::vector<double> row;
    for (int q = 1; q <= config.MaxQuantity(); ++q) {
      row.push_back(BidHoldsProbability(config, Bid{q, 1}, y));
    }
    table.push_back(std::move(row));
  }
  return table;
}

void WriteProbabilityTable(const GameConfig& config, TableFormat format,
                           std::ostream& out) {
  const auto table = BidProbabilityTable(config);
  const char* sep = format == TableFormat::kCsv ? "," : "\t";
  out << "y";
  for (int q = 1; q <= config.MaxQuantity(); ++q) out << sep << "q=" << q;
  out << "\n";
  for (int y = 0; y <= config.hand_length; ++y) {
    out << y;
    for (double p : table[y]) {
      out << sep << std::fixed << std::setprecision(4) << p;
    }
    out << "\n";
  }
  out.unsetf(std::ios::fixed);
}

}  // namespace liars_poker
