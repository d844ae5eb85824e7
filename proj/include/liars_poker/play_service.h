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

// Live tables. A session owns one seat per player, deals rounds back to back
// and advances automated seats until a human must act. Every state change is
// published as a numbered event; views are redacted per seat.

#ifndef LIARS_POKER_PLAY_SERVICE_H_
#define LIARS_POKER_PLAY_SERVICE_H_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "liars_poker/agents.h"
#include "liars_poker/engine.h"
#include "liars_poker/errors.h"
#include "liars_poker/evaluation.h"
#include "liars_poker/hand_history.h"

namespace liars_poker {

inline constexpr char kApiSchema[] = "liars-poker.v1";

struct SessionConfig {
  GameConfig config;
  std::vector<std::string> seats;  // agent descriptor per seat
  OpenerRule opener_rule = OpenerRule::kPreviousFinalBidder;
  std::uint64_t seed = 1;
  int max_rounds = 0;  // 0 = unlimited
  // Human seats that stay silent this long auto-challenge (or open with the
  // lowest bid). 0 disables.
  double turn_timeout_seconds = 0.0;
};

enum class SessionStatus { kActive, kFinished, kAborted };
std::string SessionStatusName(SessionStatus status);

// Totals and hands of a resolved round, visible to everyone.
struct RoundResult {
  int round = 0;
  std::vector<std::vector<int>> hands;
  std::vector<int> totals;
  Bid final_bid;
  int bidder = 0;
  bool bid_holds = false;
  std::vector<int> payouts;
};

struct PlayerView {
  std::string session_id;
  int seat = 0;
  GameConfig config;
  std::vector<std::string> seats;
  SessionStatus status = SessionStatus::kActive;
  std::string status_detail;
  int round = 0;  // 1-based index of the current round
  int opener = 0;
  std::vector<int> own_hand;
  Phase phase = Phase::kBidding;
  std::vector<HistoryEntry> history;
  std::optional<StandingBid> standing_bid;
  int to_act = 0;
  std::vector<Action> legal_actions;  // empty unless it is this seat's turn
  std::vector<int> ledger;
  std::optional<RoundResult> last_result;  // most recent resolved round
  std::int64_t last_seq = 0;
};

struct SessionEvent {
  std::int64_t seq = 0;  // 1, 2, 3, ... per session
  std::string kind;      // round_start, action, turn, resolution, session_end
  nlohmann::json payload;
};

// Wire forms, tagged with kApiSchema.
nlohmann::json ToJson(const GameConfig& config, const Action& action);
nlohmann::json ToJson(const RoundResult& result);
nlohmann::json ToJson(const PlayerView& view);
nlohmann::json ToJson(const SessionEvent& event);
// {"type":"bid","q":..,"r":..} or {"type":"challenge"}; throws
// InvalidArgument otherwise.
Action ActionFromJson(const GameConfig& config, const nlohmann::json& j);

// Rejection of a submitted action; carries the seat's legal set.
class ActionRejected : public IllegalAction {
 public:
  ActionRejected(const std::string& what, std::vector<Action> legal)
      : IllegalAction(what), legal_(std::move(legal)) {}
  const std::vector<Action>& legal() const { return legal_; }

 private:
  std::vector<Action> legal_;
};

class UnknownSession : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class SessionManager {
 public:
  // When history_dir is non-empty each session appends its resolved rounds to
  // <history_dir>/<session id>.jsonl, and a session created with resume_id
  // rebuilds ledger and round count from that file.
  explicit SessionManager(AgentContext context = {}, std::string history_dir = "");
  ~SessionManager();

  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  // Throws InvalidArgument on a bad config or descriptor.
  std::string CreateSession(const SessionConfig& config,
                            const std::string& resume_id = "");
  // Throws UnknownSession, ActionRejected (not this seat's turn, automated
  // seat, illegal action) or StateError (session over).
  PlayerView SubmitAction(const std::string& id, int seat, Action action);
  PlayerView GetView(const std::string& id, int seat) const;
  // Events with seq > since. With a positive wait, blocks until at least one
  // such event exists or the wait elapses.
  std::vector<SessionEvent> Events(const std::string& id, int seat,
                                   std::int64_t since,
                                   std::chrono::milliseconds wait =
                                       std::chrono::milliseconds(0)) const;
  // Applies turn timeouts that have expired by `now`. Returns the number of
  // forced moves.
  int ApplyTimeouts(std::chrono::steady_clock::time_point now =
                        std::chrono::steady_clock::now());
  std::vector<std::string> SessionIds() const;
  std::string HistoryPath(const std::string& id) const;

 private:
  struct Session;
  std::shared_ptr<Session> Find(const std::string& id) const;

  AgentContext context_;
  std::string history_dir_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

}  // namespace liars_poker

#endif  // LIARS_POKER_PLAY_SERVICE_H_
