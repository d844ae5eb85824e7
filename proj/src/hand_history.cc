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

#include "liars_poker/hand_history.h"

#include <ctime>
#include <iomanip>
#include <sstream>

#include "liars_poker/errors.h"

namespace liars_poker {

using nlohmann::json;

HandRecord MakeHandRecord(const RoundState& resolved, std::string started_at,
                          std::string finished_at) {
  const CountResult& count = resolved.count_result();
  HandRecord record;
  record.config = resolved.config();
  record.opener = resolved.opener();
  for (const Hand& h : resolved.hands()) record.hands.push_back(h.digits());
  record.actions = resolved.history();
  record.totals = count.totals;
  record.final_bid = count.final_bid;
  record.bidder = count.bidder;
  record.bid_holds = count.bid_holds;
  record.payouts = resolved.payouts();
  record.started_at = std::move(started_at);
  record.finished_at = std::move(finished_at);
  return record;
}

json ToJson(const HandRecord& r) {
  json actions = json::array();
  for (const HistoryEntry& e : r.actions) {
    actions.push_back(
        {{"player", e.player}, {"action", e.action.ToString(r.config)}});
  }
  json j = {
      {"schema", kHandRecordSchema},
      {"config",
       {{"hand_length", r.config.hand_length},
        {"digit_cardinality", r.config.digit_cardinality},
        {"num_players", r.config.num_players}}},
      {"opener", r.opener},
      {"hands", r.hands},
      {"actions", actions},
      {"totals", r.totals},
      {"final_bid", {{"q", r.final_bid.quantity}, {"r", r.final_bid.rank}}},
      {"bidder", r.bidder},
      {"bid_holds", r.bid_holds},
      {"payouts", r.payouts},
      {"started_at", r.started_at},
      {"finished_at", r.finished_at},
  };
  for (auto it = r.extra.begin(); it != r.extra.end(); ++it) {
    j[it.key()] = it.value();
  }
  return j;
}

namespace {

Action ParseActionText(const GameConfig& config, const std::string& text) {
  if (text == "CHALLENGE") return Action::Challenge();
  std::istringstream in(text);
  std::string word;
  Bid bid;
  if (in >> word >> bid.quantity >> bid.rank && word == "BID") {
    return Action::MakeBid(IndexOfBid(config, bid));
  }
  throw InvalidArgument("bad action text '" + text + "'");
}

}  // namespace

HandRecord HandRecordFromJson(const json& j) {
  try {
    if (j.at("schema").get<std::string>() != kHandRecordSchema) {
      throw InvalidArgument("unknown hand record schema");
    }
    HandRecord r;
    const json& c = j.at("config");
    r.config = GameConfig{c.at("hand_length").get<int>(),
                          c.at("digit_cardinality").get<int>(),
                          c.at("num_players").get<int>()};
    r.config.Validate();
    r.opener = j.at("opener").get<int>();
    r.hands = j.at("hands").get<std::vector<std::vector<int>>>();
    for (const json& a : j.at("actions")) {
      r.actions.push_back(HistoryEntry{
          a.at("player").get<int>(),
          ParseActionText(r.config, a.at("action").get<std::string>())});
    }
    r.totals = j.at("totals").get<std::vector<int>>();
    r.final_bid = Bid{j.at("final_bid").at("q").get<int>(),
                      j.at("final_bid").at("r").get<int>()};
    r.bidder = j.at("bidder").get<int>();
    r.bid_holds = j.at("bid_holds").get<bool>();
    r.payouts = j.at("payouts").get<std::vector<int>>();
    r.started_at = j.value("started_at", "");
    r.finished_at = j.value("finished_at", "");
    static const char* kCore[] = {
        "schema", "config", "opener", "hands", "actions", "totals",
        "final_bid", "bidder", "bid_holds", "payouts", "started_at",
        "finished_at"};
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool core = false;
      for (const char* k : kCore) core = core || it.key() == k;
      if (!core) r.extra[it.key()] = it.value();
    }
    return r;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed hand record: ") + e.what());
  }
}

RoundState ReplayHandRecord(const HandRecord& record) {
  std::vector<Hand> hands;
  for (const auto& digits : record.hands) {
    hands.push_back(Hand::FromDigits(record.config, digits));
  }
  RoundState state(record.config, std::move(hands), record.opener);
  for (const HistoryEntry& e : record.actions) {
    state.ApplyAction(e.player, e.action);
  }
  if (!state.IsResolved() || state.payouts() != record.payouts) {
    throw InvalidArgument("hand record does not replay to its payouts");
  }
  return state;
}

std::string UtcTimestamp(std::chrono::system_clock::time_point t) {
  const auto secs = std::chrono::system_clock::to_time_t(t);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      t.time_since_epoch())
                      .count() %
                  1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << "." << std::setw(3)
      << std::setfill('0') << ms << "Z";
  return out.str();
}

HandHistoryWriter::HandHistoryWriter(const std::string& path)
    : path_(path), out_(path, std::ios::app) {
  if (!out_) throw InvalidArgument("cannot open hand history " + path);
}

void HandHistoryWriter::Append(const HandRecord& record) {
  const std::string line = ToJson(record).dump();
  std::lock_guard<std::mutex> lock(mu_);
  out_ << line << '\n';
  out_.flush();
}

std::vector<HandRecord> ReadHandHistory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read hand history " + path);
  std::vector<HandRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      throw InvalidArgument("corrupt hand history line in " + path);
    }
    records.push_back(HandRecordFromJson(j));
  }
  return records;
}

}  // namespace liars_poker
