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

// JSON over HTTP for the play service.
//
//   POST /sessions                      create; body below, 201 {session_id}
//   GET  /sessions                      list session ids
//   GET  /sessions/{id}/view?seat=k     redacted PlayerView
//   POST /sessions/{id}/actions         {"seat":k,"action":{"type":"bid","q":4,"r":2}}
//                                       or {"seat":k,"action":{"type":"challenge"}}
//   GET  /sessions/{id}/events?seat=k&since=n[&follow=1][&format=json]
//                                       text/event-stream, one event per
//                                       record: "id: seq", "event: kind",
//                                       "data: {...}". With follow=1 the
//                                       stream stays open until the session
//                                       ends; format=json returns an array.
//
// Session body: {"config":"3x3x2","seats":["human","baseline"],
//   "opener_rule":"salomon"|"rotate","seed":1,"max_rounds":0,
//   "turn_timeout_seconds":0}
//
// Errors: {"schema":..,"error":{"code":..,"message":..,"legal_actions":[..]}}
// with 400 bad request, 404 unknown session, 409 not your turn or session
// over, 422 illegal action.

#ifndef LIARS_POKER_HTTP_API_H_
#define LIARS_POKER_HTTP_API_H_

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "json.hpp"
#include "liars_poker/play_service.h"

namespace httplib {
class Server;
}

namespace liars_poker {

// Parses the POST /sessions body. Throws InvalidArgument.
SessionConfig SessionConfigFromJson(const nlohmann::json& body);

class HttpApiServer {
 public:
  explicit HttpApiServer(SessionManager& sessions);
  ~HttpApiServer();

  HttpApiServer(const HttpApiServer&) = delete;
  HttpApiServer& operator=(const HttpApiServer&) = delete;

  // Binds and serves on a background thread. Port 0 picks a free port.
  // Returns the bound port; throws TransportError if binding fails.
  int Start(const std::string& host, int port);
  // Serves on the calling thread until Stop().
  void Run(const std::string& host, int port);
  void Stop();
  int port() const { return port_; }

 private:
  void Routes();
  void StartTimeoutTicker();

  SessionManager& sessions_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::thread ticker_;
  std::atomic<bool> stopping_{false};
  int port_ = 0;
};

}  // namespace liars_poker

#endif  // LIARS_POKER_HTTP_API_H_
