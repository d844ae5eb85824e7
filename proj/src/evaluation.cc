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

#include "liars_poker/evaluation.h"

#include <cmath>
#include <iomanip>
#include <optional>

#include "liars_poker/combinatorics.h"
#include "liars_poker/errors.h"
#include "liars_poker/hand_history.h"
#include "liars_poker/rng.h"

namespace liars_poker {

std::string OpenerRuleName(OpenerRule rule) {
  return rule == OpenerRule::kRotate ? "rotate" : "salomon";
}

OpenerRule ParseOpenerRule(const std::string& name) {
  if (name == "rotate") return OpenerRule::kRotate;
  if (name == "salomon" || name == "previous-final-bidder") {
    return OpenerRule::kPreviousFinalBidder;
  }
  throw InvalidArgument("unknown opener rule '" + name + "'");
}

void MatchSpec::Validate() const {
  config.Validate();
  if (hands < 1) throw InvalidArgument("a match needs at least one hand");
  if (static_cast<int>(agents.size()) != config.num_players) {
    throw InvalidArgument("need exactly one agent per seat");
  }
}

MatchAccumulator::MatchAccumulator(const GameConfig& config,
                                   std::vector<std::string> names)
    : config_(config), agents_(names.size()), sum_sq_(names.size(), 0.0) {
  for (std::size_t k = 0; k < names.size(); ++k) {
    agents_[k].name = names[k];
    agents_[k].hands_by_category.assign(config.hand_length + 1, 0);
    agents_[k].wins_by_category.assign(config.hand_length + 1, 0);
  }
}

void MatchAccumulator::Add(const RoundState& resolved,
                           const std::vector<int>& seat_of_agent,
                           const std::vector<bool>& rebid) {
  const CountResult& count = resolved.count_result();
  const std::vector<int>& payouts = resolved.payouts();
  int sum = 0;
  for (int p : payouts) sum += p;
  if (sum != 0) throw StateError("payouts do not sum to zero");
  ++hands_;
  for (std::size_t k = 0; k < agents_.size(); ++k) {
    AgentReport& a = agents_[k];
    const int seat = seat_of_agent[k];
    const int payout = payouts[seat];
    const int category = HandCategory(resolved.hand(seat));
    ++a.hands;
    a.total_equity += payout;
    sum_sq_[k] += static_cast<double>(payout) * payout;
    ++a.hands_by_category[category];
    if (payout > 0) {
      ++a.wins;
      ++a.wins_by_category[category];
      if (seat == count.bidder) {
        ++a.wins_by_bid;
      } else {
        ++a.wins_by_challenge;
      }
    }
    if (rebid[k]) ++a.rebid_hands;
  }
}

MatchReport MatchAccumulator::Finish() const {
  MatchReport report;
  report.config = config_;
  report.hands_played = hands_;
  report.agents = agents_;
  for (std::size_t k = 0; k < agents_.size(); ++k) {
    AgentReport& a = report.agents[k];
    const double n = a.hands;
    if (n > 0) {
      const double mean = a.total_equity / n;
      a.win_rate = a.wins / n;
      a.equity_per_100 = 100.0 * mean;
      const double var = n > 1 ? (sum_sq_[k] - n * mean * mean) / (n - 1) : 0.0;
      a.standard_error_per_100 = 100.0 * std::sqrt(std::max(0.0, var) / n);
      a.rebid_rate = a.rebid_hands / n;
    }
    if (a.wins > 0) {
      a.win_by_bid_share = static_cast<double>(a.wins_by_bid) / a.wins;
      a.win_by_challenge_share = static_cast<double>(a.wins_by_challenge) / a.wins;
    }
    a.win_rate_by_category.assign(a.hands_by_category.size(), 0.0);
    for (std::size_t c = 0; c < a.hands_by_category.size(); ++c) {
      if (a.hands_by_category[c] > 0) {
        a.win_rate_by_category[c] =
            static_cast<double>(a.wins_by_category[c]) / a.hands_by_category[c];
      }
    }
  }
  return report;
}

MatchReport RunMatch(const MatchSpec& spec,
                     std::vector<std::unique_ptr<Agent>> agents) {
  spec.config.Validate();
  if (spec.hands < 1) throw InvalidArgument("a match needs at least one hand");
  const int l = spec.config.num_players;
  if (static_cast<int>(agents.size()) != l) {
    throw InvalidArgument("need exactly one agent per seat");
  }
  std::vector<std::string> names;
  for (std::size_t k = 0; k < agents.size(); ++k) {
    names.push_back(k < spec.agents.size() ? spec.agents[k] : agents[k]->Name());
  }
  std::optional<HandHistoryWriter> history;
  if (!spec.history_path.empty()) history.emplace(spec.history_path);

  MatchAccumulator acc(spec.config, names);
  bool aborted = false;
  std::string reason;
  int previous_final_bidder_agent = 0;
  std::vector<int> seat_of_agent(l), agent_at_seat(l);
  for (int h = 0; h < spec.hands && !aborted; ++h) {
    for (int k = 0; k < l; ++k) {
      seat_of_agent[k] = spec.rotate_seats ? (k + h) % l : k;
      agent_at_seat[seat_of_agent[k]] = k;
    }
    const int opening_agent = spec.opener_rule == OpenerRule::kRotate
                                  ? (spec.rotate_seats ? agent_at_seat[0] : h % l)
                                  : previous_final_bidder_agent;
    RoundState state = RoundState::Deal(
        spec.config, DeriveSeed(spec.seed, h, 1), seat_of_agent[opening_agent]);
    const std::string started = UtcTimestamp();
    std::vector<bool> rebid(l, false);
    try {
      for (int move = 0; !state.IsResolved(); ++move) {
        const int seat = state.to_act();
        const int k = agent_at_seat[seat];
        const Observation obs = MakeObservation(state, seat);
        const AgentPolicyOutput out =
            agents[k]->Act(obs, DeriveSeed(spec.seed, h, 2 + move));
        if (state.phase() == Phase::kBidderDecision && out.action.is_bid()) {
          rebid[k] = true;
        }
        state.ApplyAction(seat, out.action);
      }
    } catch (const GatewayOutage& e) {
      aborted = true;
      reason = e.what();
      break;
    }
    for (int k = 0; k < l; ++k) agents[k]->OnRoundEnd(state, seat_of_agent[k]);
    acc.Add(state, seat_of_agent, rebid);
    previous_final_bidder_agent = agent_at_seat[state.count_result().bidder];
    if (history) {
      HandRecord record = MakeHandRecord(state, started, UtcTimestamp());
      nlohmann::json seats = nlohmann::json::array();
      for (int s = 0; s < l; ++s) seats.push_back(names[agent_at_seat[s]]);
      record.extra["match_hand"] = h;
      record.extra["seats"] = seats;
      history->Append(record);
    }
  }
  MatchReport report = acc.Finish();
  report.hands_requested = spec.hands;
  report.aborted = aborted;
  report.abort_reason = reason;
  report.history_path = spec.history_path;
  return report;
}

MatchReport RunMatch(const MatchSpec& spec, const AgentContext& context) {
  spec.Validate();
  std::vector<std::unique_ptr<Agent>> agents;
  for (const std::string& d : spec.agents) {
    agents.push_back(MakeAgent(d, spec.config, context));
    if (agents.back()->IsHuman()) {
      throw InvalidArgument("human seats play through the play service");
    }
  }
  return RunMatch(spec, std::move(agents));
}

std::vector<CategoryRow> BreakdownByHand(const AgentReport& agent) {
  std::vector<CategoryRow> rows;
  for (std::size_t c = 1; c < agent.hands_by_category.size(); ++c) {
    CategoryRow row;
    row.category = static_cast<int>(c);
    row.hands = agent.hands_by_category[c];
    row.wins = agent.wins_by_category[c];
    row.win_rate = row.hands > 0 ? static_cast<double>(row.wins) / row.hands : 0.0;
    rows.push_back(row);
  }
  return rows;
}

void WriteMatchReport(const MatchReport& report, ReportFormat format,
                      std::ostream& out) {
  const int h = report.config.hand_length;
  if (format == ReportFormat::kCsv) {
    out << "agent,hands,wins,win_rate,total_equity,equity_per_100,se_per_100,"
           "win_by_bid_share,win_by_challenge_share,rebid_rate";
    for (int c = 1; c <= h; ++c) out << ",win_rate_cat" << c;
    out << "\n";
    for (const AgentReport& a : report.agents) {
      out << a.name << "," << a.hands << "," << a.wins << "," << a.win_rate
          << "," << a.total_equity << "," << a.equity_per_100 << ","
          << a.standard_error_per_100 << "," << a.win_by_bid_share << ","
          << a.win_by_challenge_share << "," << a.rebid_rate;
      for (int c = 1; c <= h; ++c) out << "," << a.win_rate_by_category[c];
      out << "\n";
    }
    return;
  }
  out << report.config.ToString() << ", " << report.hands_played << " of "
      << report.hands_requested << " hands";
  if (report.aborted) out << " (aborted: " << report.abort_reason << ")";
  out << "\n";
  out << std::fixed << std::setprecision(1);
  for (const AgentReport& a : report.agents) {
    out << "  " << a.name << ": win " << 100.0 * a.win_rate << "%, equity "
        << a.equity_per_100 << " +/- " << a.standard_error_per_100
        << " per 100, wins by bid " << 100.0 * a.win_by_bid_share
        << "% / challenge " << 100.0 * a.win_by_challenge_share
        << "%, rebid " << 100.0 * a.rebid_rate << "%\n";
    out << "    by hand:";
    for (const CategoryRow& row : BreakdownByHand(a)) {
      out << " " << row.category << "-of-a-kind " << 100.0 * row.win_rate
          << "% (" << row.hands << ")";
    }
    out << "\n";
  }
  out.unsetf(std::ios::fixed);
  if (!report.history_path.empty()) {
    out << "  hand history: " << report.history_path << "\n";
  }
}

}  // namespace liars_poker
