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

// One JSON object per line per resolved round:
//
//   {"schema":"liars-poker.hand.v1","config":{...},"opener":0,
//    "hands":[[1,3,3],[2,2,1]],"actions":[{"player":0,"action":"BID 1 1"},..],
//    "totals":[..],"final_bid":{"q":4,"r":2},"bidder":1,"bid_holds":true,
//    "payouts":[..],"started_at":"...","finished_at":"...", ...extra}

#ifndef LIARS_POKER_HAND_HISTORY_H_
#define LIARS_POKER_HAND_HISTORY_H_

#include <chrono>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "liars_poker/engine.h"

namespace liars_poker {

inline constexpr char kHandRecordSchema[] = "liars-poker.hand.v1";

struct HandRecord {
  GameConfig config;
  int opener = 0;
  std::vector<std::vector<int>> hands;  // dealt digits per seat
  std::vector<HistoryEntry> actions;
  std::vector<int> totals;
  Bid final_bid;
  int bidder = 0;
  bool bid_holds = false;
  std::vector<int> payouts;
  std::string started_at;
  std::string finished_at;
  // Caller-specific fields (seat names, round number, ...).
  nlohmann::json extra = nlohmann::json::object();
};

// Throws StateError if the round is not resolved.
HandRecord MakeHandRecord(const RoundState& resolved, std::string started_at,
                          std::string finished_at);

nlohmann::json ToJson(const HandRecord& record);
// Throws InvalidArgument on a malformed record.
HandRecord HandRecordFromJson(const nlohmann::json& j);

// Rebuilds the RoundState by replaying the recorded actions; used to check
// that a record is internally consistent.
RoundState ReplayHandRecord(const HandRecord& record);

// ISO-8601 UTC with milliseconds.
std::string UtcTimestamp(
    std::chrono::system_clock::time_point t = std::chrono::system_clock::now());

// Append-only writer, safe to share between threads.
class HandHistoryWriter {
 public:
  explicit HandHistoryWriter(const std::string& path);
  void Append(const HandRecord& record);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::mutex mu_;
  std::ofstream out_;
};

std::vector<HandRecord> ReadHandHistory(const std::string& path);

}  // namespace liars_poker

#endif  // LIARS_POKER_HAND_HISTORY_H_
