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

#include "liars_poker/play_service.h"

#include <filesystem>
#include <sstream>

#include "liars_poker/llm_gateway.h"
#include "liars_poker/observation.h"
#include "liars_poker/rng.h"

namespace liars_poker {

using nlohmann::json;

std::string SessionStatusName(SessionStatus status) {
  switch (status) {
    case SessionStatus::kActive:
      return "active";
    case SessionStatus::kFinished:
      return "finished";
    case SessionStatus::kAborted:
      return "aborted";
  }
  return "unknown";
}

json ToJson(const GameConfig& config, const Action& action) {
  if (action.is_challenge()) {
    return {{"type", "challenge"}, {"text", action.ToString(config)}};
  }
  const Bid b = BidOfIndex(config, action.bid_index());
  return {{"type", "bid"}, {"q", b.quantity}, {"r", b.rank},
          {"text", action.ToString(config)}};
}

Action ActionFromJson(const GameConfig& config, const json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw InvalidArgument("action needs a string 'type'");
  }
  const std::string type = j["type"].get<std::string>();
  if (type == "challenge") return Action::Challenge();
  if (type != "bid") throw InvalidArgument("unknown action type '" + type + "'");
  if (!j.contains("q") || !j.contains("r") || !j["q"].is_number_integer() ||
      !j["r"].is_number_integer()) {
    throw InvalidArgument("bid needs integer 'q' and 'r'");
  }
  const Bid bid{j["q"].get<int>(), j["r"].get<int>()};
  if (bid.quantity < 1 || bid.quantity > config.MaxQuantity() || bid.rank < 1 ||
      bid.rank > config.digit_cardinality) {
    throw InvalidArgument("bid " + BidToString(bid) + " does not exist");
  }
  return Action::MakeBid(IndexOfBid(config, bid));
}

namespace {

json ConfigJson(const GameConfig& c) {
  return {{"hand_length", c.hand_length},
          {"digit_cardinality", c.digit_cardinality},
          {"num_players", c.num_players},
          {"name", c.ShortName()}};
}

json ActionList(const GameConfig& config, const std::vector<Action>& actions) {
  json out = json::array();
  for (const Action& a : actions) out.push_back(ToJson(config, a));
  return out;
}

json HistoryJson(const GameConfig& config,
                 const std::vector<HistoryEntry>& history) {
  json out = json::array();
  for (const HistoryEntry& e : history) {
    out.push_back({{"seat", e.player}, {"action", ToJson(config, e.action)}});
  }
  return out;
}

}  // namespace

json ToJson(const RoundResult& r) {
  return {{"round", r.round},
          {"hands", r.hands},
          {"totals", r.totals},
          {"final_bid", {{"q", r.final_bid.quantity}, {"r", r.final_bid.rank}}},
          {"bidder", r.bidder},
          {"bid_holds", r.bid_holds},
          {"winner", r.bid_holds ? "bidder" : "challengers"},
          {"payouts", r.payouts}};
}

json ToJson(const PlayerView& v) {
  json j = {{"schema", kApiSchema},
            {"session_id", v.session_id},
            {"seat", v.seat},
            {"config", ConfigJson(v.config)},
            {"seats", v.seats},
            {"status", SessionStatusName(v.status)},
            {"round", v.round},
            {"opener", v.opener},
            {"own_hand", v.own_hand},
            {"phase", PhaseName(v.phase)},
            {"history", HistoryJson(v.config, v.history)},
            {"to_act", v.to_act},
            {"your_turn", !v.legal_actions.empty()},
            {"legal_actions", ActionList(v.config, v.legal_actions)},
            {"ledger", v.ledger},
            {"last_seq", v.last_seq}};
  if (!v.status_detail.empty()) j["status_detail"] = v.status_detail;
  if (v.standing_bid) {
    const Bid b = BidOfIndex(v.config, v.standing_bid->index);
    j["standing_bid"] = {{"q", b.quantity},
                         {"r", b.rank},
                         {"bidder", v.standing_bid->bidder},
                         {"is_rebid", v.standing_bid->is_rebid}};
  } else {
    j["standing_bid"] = nullptr;
  }
  j["last_result"] = v.last_result ? ToJson(*v.last_result) : json(nullptr);
  return j;
}

json ToJson(const SessionEvent& e) {
  return {{"schema", kApiSchema}, {"seq", e.seq}, {"kind", e.kind},
          {"payload", e.payload}};
}

struct SessionManager::Session {
  std::string id;
  SessionConfig cfg;
  std::vector<std::unique_ptr<Agent>> agents;
  std::vector<bool> human;
  std::unique_ptr<HandHistoryWriter> history;

  mutable std::mutex mu;
  mutable std::condition_variable cv;
  std::optional<RoundState> state;
  int round = 0;
  int move = 0;
  int previous_bidder = 0;
  std::string started_at;
  std::vector<int> ledger;
  SessionStatus status = SessionStatus::kActive;
  std::string detail;
  std::vector<SessionEvent> events;
  std::optional<RoundResult> last_result;
  std::chrono::steady_clock::time_point turn_started;

  int num_players() const { return cfg.config.num_players; }

  void Emit(std::string kind, json payload) {
    SessionEvent e;
    e.seq = static_cast<std::int64_t>(events.size()) + 1;
    e.kind = std::move(kind);
    e.payload = std::move(payload);
    events.push_back(std::move(e));
    cv.notify_all();
  }

  void End(SessionStatus s, const std::string& why) {
    status = s;
    detail = why;
    Emit("session_end", {{"status", SessionStatusName(s)},
                         {"detail", why},
                         {"ledger", ledger},
                         {"rounds", round}});
  }

  void EmitTurn() {
    turn_started = std::chrono::steady_clock::now();
    Emit("turn", {{"round", round},
                  {"seat", state->to_act()},
                  {"phase", PhaseName(state->phase())},
                  {"human", static_cast<bool>(human[state->to_act()])}});
  }

  // Deals the next round; false when the round limit is reached.
  bool NextRound() {
    if (cfg.max_rounds > 0 && round >= cfg.max_rounds) {
      End(SessionStatus::kFinished, "round limit reached");
      return false;
    }
    const int l = num_players();
    const int opener = cfg.opener_rule == OpenerRule::kRotate
                           ? round % l
                           : (round == 0 ? 0 : previous_bidder);
    ++round;
    move = 0;
    state = RoundState::Deal(cfg.config, DeriveSeed(cfg.seed, round, 1), opener);
    started_at = UtcTimestamp();
    Emit("round_start", {{"round", round}, {"opener", opener}});
    EmitTurn();
    return true;
  }

  void Apply(int seat, Action action, bool forced) {
    const bool rebid = state->phase() == Phase::kBidderDecision && action.is_bid();
    const bool count = state->phase() == Phase::kBidderDecision && action.is_challenge();
    state->ApplyAction(seat, action);
    ++move;
    json payload = {{"round", round},
                    {"seat", seat},
                    {"action", ToJson(cfg.config, action)},
                    {"rebid", rebid},
                    {"count", count}};
    if (forced) payload["forced"] = true;
    Emit("action", std::move(payload));
    if (!state->IsResolved()) EmitTurn();
  }

  void FinishRound() {
    const CountResult& c = state->count_result();
    RoundResult r;
    r.round = round;
    for (const Hand& h : state->hands()) r.hands.push_back(h.digits());
    r.totals = c.totals;
    r.final_bid = c.final_bid;
    r.bidder = c.bidder;
    r.bid_holds = c.bid_holds;
    r.payouts = state->payouts();
    int sum = 0;
    for (int p = 0; p < num_players(); ++p) {
      ledger[p] += r.payouts[p];
      sum += ledger[p];
    }
    if (sum != 0) throw StateError("ledger lost conservation");
    previous_bidder = c.bidder;
    last_result = r;
    for (int p = 0; p < num_players(); ++p) agents[p]->OnRoundEnd(*state, p);
    if (history) {
      HandRecord record = MakeHandRecord(*state, started_at, UtcTimestamp());
      record.extra["session"] = id;
      record.extra["round"] = round;
      record.extra["seats"] = cfg.seats;
      history->Append(record);
    }
    json payload = ToJson(r);
    payload["ledger"] = ledger;
    Emit("resolution", std::move(payload));
  }

  // Plays automated seats until a human must act or the session ends.
  void Pump() {
    while (status == SessionStatus::kActive) {
      if (state->IsResolved()) {
        FinishRound();
        if (!NextRound()) return;
        continue;
      }
      const int seat = state->to_act();
      if (human[seat]) return;
      try {
        const Observation obs = MakeObservation(*state, seat);
        const AgentPolicyOutput out =
            agents[seat]->Act(obs, DeriveSeed(cfg.seed, round, 2 + move));
        Apply(seat, out.action, false);
      } catch (const GatewayOutage& e) {
        End(SessionStatus::kAborted, e.what());
      } catch (const std::exception& e) {
        End(SessionStatus::kAborted,
            "seat " + std::to_string(seat) + " failed: " + e.what());
      }
    }
  }

  PlayerView View(int seat) const {
    if (seat < 0 || seat >= num_players()) {
      throw InvalidArgument("seat " + std::to_string(seat) + " out of range");
    }
    PlayerView v;
    v.session_id = id;
    v.seat = seat;
    v.config = cfg.config;
    v.seats = cfg.seats;
    v.status = status;
    v.status_detail = detail;
    v.round = round;
    v.opener = state->opener();
    v.own_hand = state->hand(seat).digits();
    v.phase = state->phase();
    v.history = state->history();
    v.standing_bid = state->standing_bid();
    v.to_act = state->to_act();
    if (status == SessionStatus::kActive && !state->IsResolved() &&
        state->to_act() == seat) {
      v.legal_actions = state->LegalActions();
    }
    v.ledger = ledger;
    v.last_result = last_result;
    v.last_seq = static_cast<std::int64_t>(events.size());
    return v;
  }
};

SessionManager::SessionManager(AgentContext context, std::string history_dir)
    : context_(std::move(context)), history_dir_(std::move(history_dir)) {
  if (!history_dir_.empty()) std::filesystem::create_directories(history_dir_);
}

SessionManager::~SessionManager() = default;

std::string SessionManager::HistoryPath(const std::string& id) const {
  if (history_dir_.empty()) return "";
  return (std::filesystem::path(history_dir_) / (id + ".jsonl")).string();
}

std::string SessionManager::CreateSession(const SessionConfig& config,
                                          const std::string& resume_id) {
  config.config.Validate();
  const int l = config.config.num_players;
  if (static_cast<int>(config.seats.size()) != l) {
    throw InvalidArgument("need " + std::to_string(l) + " seat descriptors, got " +
                          std::to_string(config.seats.size()));
  }
  if (config.max_rounds < 0) throw InvalidArgument("max_rounds must be >= 0");
  if (config.turn_timeout_seconds < 0) {
    throw InvalidArgument("turn timeout must be >= 0");
  }
  auto s = std::make_shared<Session>();
  s->cfg = config;
  s->ledger.assign(l, 0);
  bool any_human = false;
  for (const std::string& d : config.seats) {
    s->agents.push_back(MakeAgent(d, config.config, context_));
    s->human.push_back(s->agents.back()->IsHuman());
    any_human = any_human || s->human.back();
  }
  if (!any_human && config.max_rounds == 0) {
    throw InvalidArgument("a table without human seats needs a round limit");
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!resume_id.empty()) {
      if (sessions_.count(resume_id)) {
        throw InvalidArgument("session " + resume_id + " is already live");
      }
      s->id = resume_id;
    } else {
      do {
        std::ostringstream o;
        o << "s" << next_id_++;
        s->id = o.str();
      } while (sessions_.count(s->id) ||
               (!history_dir_.empty() &&
                std::filesystem::exists(HistoryPath(s->id))));
    }
  }
  if (!history_dir_.empty()) {
    const std::string path = HistoryPath(s->id);
    if (!resume_id.empty() && std::filesystem::exists(path)) {
      for (const HandRecord& r : ReadHandHistory(path)) {
        if (!(r.config == config.config)) {
          throw InvalidArgument("history of " + resume_id + " uses another config");
        }
        for (int p = 0; p < l; ++p) s->ledger[p] += r.payouts[p];
        s->previous_bidder = r.bidder;
        ++s->round;
      }
    }
    s->history = std::make_unique<HandHistoryWriter>(path);
  }
  {
    std::lock_guard<std::mutex> lock(s->mu);
    if (s->NextRound()) s->Pump();
  }
  std::lock_guard<std::mutex> lock(mu_);
  sessions_[s->id] = s;
  return s->id;
}

std::shared_ptr<SessionManager::Session> SessionManager::Find(
    const std::string& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw UnknownSession("unknown session '" + id + "'");
  return it->second;
}

PlayerView SessionManager::SubmitAction(const std::string& id, int seat,
                                        Action action) {
  std::shared_ptr<Session> s = Find(id);
  std::lock_guard<std::mutex> lock(s->mu);
  if (seat < 0 || seat >= s->num_players()) {
    throw InvalidArgument("seat " + std::to_string(seat) + " out of range");
  }
  if (s->status != SessionStatus::kActive) {
    throw StateError("session " + id + " is " + SessionStatusName(s->status));
  }
  if (!s->human[seat]) throw ActionRejected("seat is automated", {});
  if (s->state->to_act() != seat) {
    throw ActionRejected("not your turn; seat " +
                             std::to_string(s->state->to_act()) + " is to act",
                         {});
  }
  std::vector<Action> legal = s->state->LegalActions();
  if (!s->state->IsLegal(action)) {
    throw ActionRejected(action.ToString(s->cfg.config) + " is not legal",
                         std::move(legal));
  }
  s->Apply(seat, action, false);
  s->Pump();
  return s->View(seat);
}

PlayerView SessionManager::GetView(const std::string& id, int seat) const {
  std::shared_ptr<Session> s = Find(id);
  std::lock_guard<std::mutex> lock(s->mu);
  return s->View(seat);
}

std::vector<SessionEvent> SessionManager::Events(
    const std::string& id, int seat, std::int64_t since,
    std::chrono::milliseconds wait) const {
  std::shared_ptr<Session> s = Find(id);
  std::unique_lock<std::mutex> lock(s->mu);
  if (seat < 0 || seat >= s->num_players()) {
    throw InvalidArgument("seat " + std::to_string(seat) + " out of range");
  }
  if (since < 0) since = 0;
  if (wait.count() > 0) {
    s->cv.wait_for(lock, wait, [&] {
      return static_cast<std::int64_t>(s->events.size()) > since;
    });
  }
  std::vector<SessionEvent> out;
  for (std::size_t i = static_cast<std::size_t>(since); i < s->events.size(); ++i) {
    out.push_back(s->events[i]);
  }
  return out;
}

int SessionManager::ApplyTimeouts(std::chrono::steady_clock::time_point now) {
  std::vector<std::shared_ptr<Session>> all;
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& [id, s] : sessions_) all.push_back(s);
  }
  int forced = 0;
  for (const std::shared_ptr<Session>& s : all) {
    std::lock_guard<std::mutex> lock(s->mu);
    if (s->cfg.turn_timeout_seconds <= 0 || s->status != SessionStatus::kActive ||
        s->state->IsResolved() || !s->human[s->state->to_act()]) {
      continue;
    }
    const std::chrono::duration<double> idle = now - s->turn_started;
    if (idle.count() < s->cfg.turn_timeout_seconds) continue;
    s->Apply(s->state->to_act(), FallbackAction(s->state->LegalActions()), true);
    s->Pump();
    ++forced;
  }
  return forced;
}

std::vector<std::string> SessionManager::SessionIds() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<std::string> ids;
  for (const auto& [id, s] : sessions_) ids.push_back(id);
  return ids;
}

}  // namespace liars_poker
