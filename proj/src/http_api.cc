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

#include "liars_poker/http_api.h"

#include <chrono>

#include "httplib.h"
#include "liars_poker/errors.h"

namespace liars_poker {

using nlohmann::json;

namespace {

constexpr int kThreadPool = 32;
constexpr auto kFollowWait = std::chrono::milliseconds(15000);
constexpr auto kTickerPeriod = std::chrono::milliseconds(200);

void SendJson(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void SendError(httplib::Response& res, int status, const std::string& code,
               const std::string& message, const json& legal = nullptr) {
  json err = {{"code", code}, {"message", message}};
  if (!legal.is_null()) err["legal_actions"] = legal;
  SendJson(res, status, {{"schema", kApiSchema}, {"error", err}});
}

int IntParam(const httplib::Request& req, const std::string& name, int fallback) {
  if (!req.has_param(name)) return fallback;
  try {
    return std::stoi(req.get_param_value(name));
  } catch (const std::exception&) {
    throw InvalidArgument("query parameter '" + name + "' must be an integer");
  }
}

json ParseBody(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("body is not JSON: ") + e.what());
  }
}

std::string SseFrame(const SessionEvent& e) {
  return "id: " + std::to_string(e.seq) + "\nevent: " + e.kind +
         "\ndata: " + ToJson(e).dump() + "\n\n";
}

// Runs `body`, mapping library exceptions to HTTP errors.
template <typename F>
void Guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const UnknownSession& e) {
    SendError(res, 404, "unknown_session", e.what());
  } catch (const ActionRejected& e) {
    json legal = json::array();
    const bool turn = !e.legal().empty();
    SendError(res, turn ? 422 : 409, turn ? "illegal_action" : "not_your_turn",
              e.what(), legal);
  } catch (const InvalidArgument& e) {
    SendError(res, 400, "bad_request", e.what());
  } catch (const StateError& e) {
    SendError(res, 409, "session_over", e.what());
  } catch (const std::exception& e) {
    SendError(res, 500, "internal", e.what());
  }
}

}  // namespace

SessionConfig SessionConfigFromJson(const json& body) {
  if (!body.is_object()) throw InvalidArgument("session body must be an object");
  SessionConfig cfg;
  try {
    const json& c = body.at("config");
    if (c.is_string()) {
      cfg.config = ParseGameConfig(c.get<std::string>());
    } else {
      cfg.config.hand_length = c.at("hand_length").get<int>();
      cfg.config.digit_cardinality = c.at("digit_cardinality").get<int>();
      cfg.config.num_players = c.at("num_players").get<int>();
    }
    cfg.seats = body.at("seats").get<std::vector<std::string>>();
    cfg.opener_rule = ParseOpenerRule(body.value("opener_rule", "salomon"));
    cfg.seed = body.value("seed", std::uint64_t{1});
    cfg.max_rounds = body.value("max_rounds", 0);
    cfg.turn_timeout_seconds = body.value("turn_timeout_seconds", 0.0);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad session body: ") + e.what());
  }
  cfg.config.Validate();
  return cfg;
}

HttpApiServer::HttpApiServer(SessionManager& sessions)
    : sessions_(sessions), server_(std::make_unique<httplib::Server>()) {
  server_->new_task_queue = [] { return new httplib::ThreadPool(kThreadPool); };
  server_->set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  Routes();
}

HttpApiServer::~HttpApiServer() { Stop(); }

void HttpApiServer::Routes() {
  httplib::Server& s = *server_;

  s.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });

  s.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    Guarded(res, [&] {
      const std::string id = sessions_.CreateSession(SessionConfigFromJson(ParseBody(req)));
      SendJson(res, 201, {{"schema", kApiSchema}, {"session_id", id}});
    });
  });

  s.Get("/sessions", [this](const httplib::Request&, httplib::Response& res) {
    Guarded(res, [&] {
      SendJson(res, 200, {{"schema", kApiSchema}, {"sessions", sessions_.SessionIds()}});
    });
  });

  s.Get(R"(/sessions/([^/]+)/view)",
        [this](const httplib::Request& req, httplib::Response& res) {
          Guarded(res, [&] {
            if (!req.has_param("seat")) throw InvalidArgument("seat is required");
            const PlayerView v =
                sessions_.GetView(req.matches[1].str(), IntParam(req, "seat", 0));
            SendJson(res, 200, ToJson(v));
          });
        });

  s.Post(R"(/sessions/([^/]+)/actions)",
         [this](const httplib::Request& req, httplib::Response& res) {
           Guarded(res, [&] {
             const std::string id = req.matches[1].str();
             const json body = ParseBody(req);
             if (!body.is_object() || !body.contains("seat") ||
                 !body["seat"].is_number_integer()) {
               throw InvalidArgument("body needs an integer 'seat'");
             }
             const int seat = body["seat"].get<int>();
             const GameConfig config = sessions_.GetView(id, seat).config;
             const Action action =
                 ActionFromJson(config, body.contains("action") ? body["action"] : body);
             try {
               SendJson(res, 200, ToJson(sessions_.SubmitAction(id, seat, action)));
             } catch (const ActionRejected& e) {
               json legal = json::array();
               for (const Action& a : e.legal()) legal.push_back(ToJson(config, a));
               const bool turn = !e.legal().empty();
               SendError(res, turn ? 422 : 409,
                         turn ? "illegal_action" : "not_your_turn", e.what(), legal);
             }
           });
         });

  s.Get(R"(/sessions/([^/]+)/events)",
        [this](const httplib::Request& req, httplib::Response& res) {
          Guarded(res, [&] {
            const std::string id = req.matches[1].str();
            const int seat = IntParam(req, "seat", 0);
            std::int64_t since = IntParam(req, "since", 0);
            if (req.has_header("Last-Event-ID")) {
              since = std::stoll(req.get_header_value("Last-Event-ID"));
            }
            const bool follow = IntParam(req, "follow", 0) != 0;
            const std::vector<SessionEvent> now = sessions_.Events(id, seat, since);
            if (req.get_param_value("format") == "json") {
              json arr = json::array();
              for (const SessionEvent& e : now) arr.push_back(ToJson(e));
              SendJson(res, 200, {{"schema", kApiSchema}, {"events", arr}});
              return;
            }
            if (!follow) {
              std::string body;
              for (const SessionEvent& e : now) body += SseFrame(e);
              res.set_header("Cache-Control", "no-cache");
              res.set_content(body, "text/event-stream");
              return;
            }
            res.set_header("Cache-Control", "no-cache");
            auto cursor = std::make_shared<std::int64_t>(since);
            res.set_chunked_content_provider(
                "text/event-stream",
                [this, id, seat, cursor](std::size_t, httplib::DataSink& sink) {
                  if (stopping_) {
                    sink.done();
                    return true;
                  }
                  std::vector<SessionEvent> events;
                  try {
                    events = sessions_.Events(id, seat, *cursor, kFollowWait);
                  } catch (const std::exception&) {
                    sink.done();
                    return true;
                  }
                  if (events.empty()) {
                    const std::string ping = ": keep-alive\n\n";
                    return sink.write(ping.data(), ping.size());
                  }
                  for (const SessionEvent& e : events) {
                    const std::string frame = SseFrame(e);
                    if (!sink.write(frame.data(), frame.size())) return false;
                    *cursor = e.seq;
                    if (e.kind == "session_end") {
                      sink.done();
                      return true;
                    }
                  }
                  return true;
                });
          });
        });
}

void HttpApiServer::StartTimeoutTicker() {
  ticker_ = std::thread([this] {
    while (!stopping_) {
      std::this_thread::sleep_for(kTickerPeriod);
      try {
        sessions_.ApplyTimeouts();
      } catch (const std::exception&) {
      }
    }
  });
}

int HttpApiServer::Start(const std::string& host, int port) {
  port_ = port == 0 ? server_->bind_to_any_port(host)
                    : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ <= 0) throw TransportError("cannot bind " + host + ":" + std::to_string(port));
  stopping_ = false;
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  StartTimeoutTicker();
  return port_;
}

void HttpApiServer::Run(const std::string& host, int port) {
  if (!server_->bind_to_port(host, port)) {
    throw TransportError("cannot bind " + host + ":" + std::to_string(port));
  }
  port_ = port;
  stopping_ = false;
  StartTimeoutTicker();
  server_->listen_after_bind();
  stopping_ = true;
  if (ticker_.joinable()) ticker_.join();
}

void HttpApiServer::Stop() {
  stopping_ = true;
  server_->stop();
  if (thread_.joinable()) thread_.join();
  if (ticker_.joinable()) ticker_.join();
}

}  // namespace liars_poker
