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

#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "liars_poker/http_api.h"
#include "liars_poker/llm_gateway.h"
#include "liars_poker/play_service.h"
// After Eigen: <resolv.h> defines a _res macro.
#include "httplib.h"

namespace lp = liars_poker;
using nlohmann::json;

namespace {

lp::SessionConfig Table(lp::GameConfig c, std::vector<std::string> seats,
                        std::uint64_t seed = 1) {
  lp::SessionConfig s;
  s.config = c;
  s.seats = std::move(seats);
  s.seed = seed;
  return s;
}

// Plays the human seat with a seeded random choice until `rounds` rounds
// have resolved or the session stops.
void PlayHuman(lp::SessionManager& m, const std::string& id, int seat, int rounds,
               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int guard = 0; guard < 100000; ++guard) {
    const lp::PlayerView v = m.GetView(id, seat);
    if (v.status != lp::SessionStatus::kActive) return;
    if (v.round > rounds) return;
    REQUIRE_FALSE(v.legal_actions.empty());
    m.SubmitAction(id, seat, v.legal_actions[rng() % v.legal_actions.size()]);
  }
  FAIL("human loop did not finish");
}

// Every key path in a JSON document.
void Keys(const json& j, const std::string& prefix, std::set<std::string>* out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      out->insert(prefix + it.key());
      Keys(it.value(), prefix + it.key() + ".", out);
    }
  } else if (j.is_array()) {
    for (const json& e : j) Keys(e, prefix, out);
  }
}

std::string TempDir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(p);
  return p.string();
}

}  // namespace

TEST_CASE("event stream, ledger and opener rule") {
  lp::SessionManager m;
  const lp::GameConfig c{3, 3, 3};
  const std::string id = m.CreateSession(Table(c, {"baseline", "human", "random"}, 5));
  PlayHuman(m, id, 1, 40, 9);
  const auto events = m.Events(id, 1, 0);
  REQUIRE(events.size() > 100);
  std::vector<int> ledger(3, 0);
  int previous_bidder = -1;
  int resolutions = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const lp::SessionEvent& e = events[i];
    CHECK(e.seq == static_cast<std::int64_t>(i) + 1);
    if (e.kind == "round_start") {
      CHECK(e.payload["opener"] == (previous_bidder < 0 ? 0 : previous_bidder));
    } else if (e.kind == "resolution") {
      ++resolutions;
      int sum = 0;
      for (int p = 0; p < 3; ++p) {
        ledger[p] += e.payload["payouts"][p].get<int>();
        sum += ledger[p];
      }
      CHECK(sum == 0);
      CHECK(e.payload["ledger"] == ledger);
      previous_bidder = e.payload["bidder"];
    } else {
      CHECK((e.kind == "action" || e.kind == "turn"));
    }
  }
  CHECK(resolutions == 40);
  CHECK(m.GetView(id, 0).ledger == ledger);
  // since filters by sequence number.
  const auto tail = m.Events(id, 0, 10);
  REQUIRE_FALSE(tail.empty());
  CHECK(tail.front().seq == 11);
  CHECK(m.Events(id, 0, static_cast<std::int64_t>(events.size())).empty());
}

TEST_CASE("rotating opener") {
  lp::SessionManager m;
  lp::SessionConfig cfg = Table({3, 3, 3}, {"human", "random", "random"}, 2);
  cfg.opener_rule = lp::OpenerRule::kRotate;
  const std::string id = m.CreateSession(cfg);
  PlayHuman(m, id, 0, 9, 4);
  int round = 0;
  for (const lp::SessionEvent& e : m.Events(id, 0, 0)) {
    if (e.kind == "round_start") CHECK(e.payload["opener"] == round++ % 3);
  }
  CHECK(round >= 9);
}

TEST_CASE("views and events are redacted") {
  lp::SessionManager m;
  const lp::GameConfig c{3, 3, 2};
  const std::string id = m.CreateSession(Table(c, {"human", "baseline"}, 8));
  std::mt19937_64 rng(1);
  for (int step = 0; step < 200; ++step) {
    const lp::PlayerView v = m.GetView(id, 0);
    const json j = lp::ToJson(v);
    std::set<std::string> keys;
    Keys(j, "", &keys);
    for (const std::string& k : keys) {
      if (k.find("hands") != std::string::npos) CHECK(k.rfind("last_result.", 0) == 0);
    }
    CHECK(j["own_hand"].size() == 3);
    if (v.last_result) CHECK(v.last_result->round < v.round);
    // The opponent's view shows its own hand and no legal moves.
    const lp::PlayerView other = m.GetView(id, 1);
    CHECK(other.legal_actions.empty());
    CHECK(other.own_hand != std::vector<int>{});
    m.SubmitAction(id, 0, v.legal_actions[rng() % v.legal_actions.size()]);
  }
  for (const lp::SessionEvent& e : m.Events(id, 0, 0)) {
    std::set<std::string> keys;
    Keys(e.payload, "", &keys);
    const bool reveals = keys.count("hands") > 0;
    CHECK(reveals == (e.kind == "resolution"));
    CHECK(keys.count("own_hand") == 0);
  }
}

TEST_CASE("rejections") {
  lp::SessionManager m;
  const lp::GameConfig c{3, 3, 2};
  const std::string id = m.CreateSession(Table(c, {"human", "baseline"}, 3));
  CHECK_THROWS_AS(m.GetView("nope", 0), lp::UnknownSession);
  CHECK_THROWS_AS(m.GetView(id, 2), lp::InvalidArgument);
  // Find a position where the human must act facing a bid.
  lp::PlayerView v = m.GetView(id, 0);
  for (int guard = 0; guard < 1000 && !v.standing_bid; ++guard) {
    v = m.SubmitAction(id, 0, v.legal_actions.front());
  }
  REQUIRE(v.standing_bid);
  REQUIRE_FALSE(v.legal_actions.empty());
  const lp::Action below = lp::Action::MakeBid(0);
  if (v.standing_bid->index > 0) {
    try {
      m.SubmitAction(id, 0, below);
      FAIL("illegal bid accepted");
    } catch (const lp::ActionRejected& e) {
      CHECK(e.legal() == v.legal_actions);
    }
  }
  try {
    m.SubmitAction(id, 1, lp::Action::Challenge());
    FAIL("automated seat accepted a move");
  } catch (const lp::ActionRejected& e) {
    CHECK(e.legal().empty());
  }
  CHECK(m.GetView(id, 0).last_seq == v.last_seq);

  // Two humans: the idle one is told it is not their turn.
  const std::string duo = m.CreateSession(Table(c, {"human", "human"}, 3));
  const lp::PlayerView first = m.GetView(duo, 0);
  CHECK(first.to_act == 0);
  try {
    m.SubmitAction(duo, 1, lp::Action::MakeBid(0));
    FAIL("out of turn move accepted");
  } catch (const lp::ActionRejected& e) {
    CHECK(e.legal().empty());
    CHECK(std::string(e.what()).find("not your turn") != std::string::npos);
  }
  CHECK_THROWS_AS(m.CreateSession(Table(c, {"human"}, 1)), lp::InvalidArgument);
  CHECK_THROWS_AS(m.CreateSession(Table(c, {"baseline", "random"}, 1)), lp::InvalidArgument);
}

TEST_CASE("automated tables finish and refuse moves") {
  lp::SessionManager m;
  lp::SessionConfig cfg = Table({3, 3, 2}, {"baseline", "random"}, 4);
  cfg.max_rounds = 25;
  const std::string id = m.CreateSession(cfg);
  const lp::PlayerView v = m.GetView(id, 0);
  CHECK(v.status == lp::SessionStatus::kFinished);
  CHECK(v.round == 25);
  const auto events = m.Events(id, 0, 0);
  CHECK(events.back().kind == "session_end");
  CHECK(events.back().payload["rounds"] == 25);
  CHECK_THROWS_AS(m.SubmitAction(id, 0, lp::Action::Challenge()), lp::StateError);
}

TEST_CASE("sessions are deterministic per seed") {
  auto run = [](std::uint64_t seed) {
    lp::SessionManager m;
    const std::string id =
        m.CreateSession(Table({3, 3, 3}, {"human", "baseline", "random"}, seed));
    PlayHuman(m, id, 0, 15, 77);
    std::vector<json> out;
    for (const lp::SessionEvent& e : m.Events(id, 0, 0)) out.push_back(lp::ToJson(e));
    return out;
  };
  const auto a = run(12);
  CHECK(a == run(12));
  CHECK(a != run(13));
}

TEST_CASE("turn timeouts force a fallback move") {
  lp::SessionManager m;
  lp::SessionConfig cfg = Table({3, 3, 2}, {"human", "baseline"}, 6);
  cfg.turn_timeout_seconds = 30;
  const std::string id = m.CreateSession(cfg);
  const auto now = std::chrono::steady_clock::now();
  CHECK(m.ApplyTimeouts(now) == 0);
  const lp::PlayerView before = m.GetView(id, 0);
  const lp::Action expected = lp::FallbackAction(before.legal_actions);
  CHECK(m.ApplyTimeouts(now + std::chrono::seconds(31)) == 1);
  bool found = false;
  for (const lp::SessionEvent& e : m.Events(id, 0, before.last_seq)) {
    if (e.kind == "action" && e.payload.value("forced", false)) {
      found = true;
      CHECK(e.payload["seat"] == 0);
      CHECK(e.payload["action"] == lp::ToJson(cfg.config, expected));
    }
  }
  CHECK(found);
}

TEST_CASE("sessions resume from their hand history") {
  const std::string dir = TempDir("lpoker_play_resume");
  std::vector<int> ledger;
  std::string id;
  const lp::SessionConfig cfg = Table({3, 3, 2}, {"human", "baseline"}, 3);
  {
    lp::SessionManager m({}, dir);
    id = m.CreateSession(cfg);
    PlayHuman(m, id, 0, 6, 5);
    ledger = m.GetView(id, 0).ledger;
    CHECK(lp::ReadHandHistory(m.HistoryPath(id)).size() == 6);
  }
  lp::SessionManager m({}, dir);
  CHECK(m.CreateSession(cfg) != id);
  const std::string resumed = m.CreateSession(cfg, id);
  CHECK(resumed == id);
  const lp::PlayerView v = m.GetView(id, 0);
  CHECK(v.ledger == ledger);
  CHECK(v.round == 7);
  CHECK_THROWS_AS(m.CreateSession(cfg, id), lp::InvalidArgument);
  std::filesystem::remove_all(dir);
}

TEST_CASE("LLM seats at a live table") {
  class Scripted : public lp::ChatTransport {
   public:
    std::string Complete(const std::vector<lp::ChatMessage>&, const lp::LLMProfile&) override {
      return ++n % 2 ? "CHALLENGE" : "BID 9 9";
    }
    int n = 0;
  };
  lp::LLMProfile p;
  p.name = "scripted";
  p.endpoint = "http://127.0.0.1:1/";
  p.model = "m";
  lp::SessionManager m(lp::MakeLlmAgentContext({{"scripted", p}},
                                               [] { return std::make_shared<Scripted>(); }));
  const std::string id = m.CreateSession(Table({3, 3, 2}, {"human", "llm:scripted"}, 2));
  PlayHuman(m, id, 0, 10, 3);
  CHECK(m.GetView(id, 0).round > 10);
  CHECK(m.GetView(id, 0).status == lp::SessionStatus::kActive);
}

TEST_CASE("HTTP API round trip") {
  lp::SessionManager sessions;
  lp::HttpApiServer server(sessions);
  const int port = server.Start("127.0.0.1", 0);
  REQUIRE(port > 0);
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(std::chrono::seconds(20));

  auto post = [&](const std::string& path, const json& body) {
    return client.Post(path, body.dump(), "application/json");
  };
  auto res = post("/sessions", {{"config", "3x3x2"},
                                {"seats", {"human", "baseline"}},
                                {"seed", 4},
                                {"max_rounds", 3}});
  REQUIRE(res);
  REQUIRE(res->status == 201);
  const std::string id = json::parse(res->body)["session_id"];
  CHECK(json::parse(client.Get("/sessions")->body)["sessions"].size() == 1);

  CHECK(client.Get("/sessions/zzz/view?seat=0")->status == 404);
  CHECK(client.Get("/sessions/" + id + "/view")->status == 400);
  CHECK(post("/sessions", {{"config", "0x3x2"}})->status == 400);
  CHECK(client.Post("/sessions/" + id + "/actions", "{", "application/json")->status == 400);

  json view = json::parse(client.Get("/sessions/" + id + "/view?seat=0")->body);
  CHECK(view["schema"] == lp::kApiSchema);
  CHECK(view["your_turn"] == true);

  // Out of range bid, an automated seat, then legal play to the end.
  res = post("/sessions/" + id + "/actions",
             {{"seat", 0}, {"action", {{"type", "bid"}, {"q", 9}, {"r", 9}}}});
  CHECK(res->status == 400);
  res = post("/sessions/" + id + "/actions", {{"seat", 1}, {"action", {{"type", "challenge"}}}});
  CHECK(res->status == 409);
  CHECK(json::parse(res->body)["error"]["code"] == "not_your_turn");
  bool saw_illegal = false;
  for (int guard = 0; guard < 500; ++guard) {
    view = json::parse(client.Get("/sessions/" + id + "/view?seat=0")->body);
    if (view["status"] != "active") break;
    if (!view["standing_bid"].is_null() && view["phase"] == "bidding" && !saw_illegal) {
      res = post("/sessions/" + id + "/actions",
                 {{"seat", 0}, {"action", {{"type", "bid"}, {"q", 1}, {"r", 1}}}});
      if (res->status == 422) {
        saw_illegal = true;
        const json err = json::parse(res->body)["error"];
        CHECK(err["code"] == "illegal_action");
        CHECK(err["legal_actions"] == view["legal_actions"]);
        continue;
      }
    }
    res = post("/sessions/" + id + "/actions",
               {{"seat", 0}, {"action", view["legal_actions"].back()}});
    REQUIRE(res->status == 200);
  }
  CHECK(view["status"] == "finished");
  res = post("/sessions/" + id + "/actions", {{"seat", 0}, {"type", "challenge"}});
  CHECK(res->status == 409);
  CHECK(json::parse(res->body)["error"]["code"] == "session_over");

  const json events =
      json::parse(client.Get("/sessions/" + id + "/events?seat=0&format=json")->body)["events"];
  REQUIRE(events.size() > 5);
  for (std::size_t i = 0; i < events.size(); ++i) CHECK(events[i]["seq"] == i + 1);
  CHECK(events.back()["kind"] == "session_end");

  // Server-sent events, resumed with Last-Event-ID, then a followed stream
  // that closes on session_end.
  res = client.Get("/sessions/" + id + "/events?seat=0", {{"Last-Event-ID", "3"}});
  REQUIRE(res->status == 200);
  CHECK(res->get_header_value("Content-Type").find("text/event-stream") == 0);
  std::istringstream sse(res->body);
  std::int64_t expected = 4;
  for (std::string line; std::getline(sse, line);) {
    if (line.rfind("id: ", 0) == 0) CHECK(std::stoll(line.substr(4)) == expected++);
  }
  CHECK(expected == static_cast<std::int64_t>(events.size()) + 1);
  res = client.Get("/sessions/" + id + "/events?seat=0&follow=1&since=0");
  REQUIRE(res);
  CHECK(res->body.find("event: session_end") != std::string::npos);

  // Options preflight for browser clients.
  CHECK(client.Options("/sessions")->status == 204);
  server.Stop();
}
