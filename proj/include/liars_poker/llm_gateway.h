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

// Seats a chat-completion model at the table. The model receives an HTML
// rules document once per context, then one user message per decision and
// must answer with exactly "BID <q> <r>" or "CHALLENGE". Invalid replies are
// re-prompted; after the retry budget the seat plays a fallback move. The
// context is cleared and the rules re-sent every 100 rounds.

#ifndef LIARS_POKER_LLM_GATEWAY_H_
#define LIARS_POKER_LLM_GATEWAY_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "liars_poker/agents.h"
#include "liars_poker/engine.h"
#include "liars_poker/observation.h"

namespace liars_poker {

inline constexpr char kPromptVersion[] = "lp-prompt-1";
inline constexpr int kRoundsPerContext = 100;

struct LLMProfile {
  std::string name;
  std::string endpoint;  // full URL of the chat-completions resource
  std::string model;
  std::string api_key_env;  // name of the environment variable
  double timeout_seconds = 60.0;
  int max_retries = 3;        // re-prompts after an invalid reply
  int transport_retries = 1;  // extra attempts after a failed request
  // Consecutive moves lost to transport failure before the gateway reports
  // an outage.
  int outage_after = 3;
  double temperature = 0.0;

  void Validate() const;
};

// {"profiles": [{"name": ..., "endpoint": ..., "model": ...,
//   "api_key_env": ..., "timeout_seconds": ..., "max_retries": ...,
//   "temperature": ...}, ...]}
std::map<std::string, LLMProfile> ParseProfiles(const std::string& json_text);
std::map<std::string, LLMProfile> LoadProfiles(const std::string& path);

struct ChatMessage {
  std::string role;  // "system", "user" or "assistant"
  std::string content;
};

class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  // Returns the assistant text. Throws TransportError on network failure,
  // timeout, a non-2xx status or a malformed response.
  virtual std::string Complete(const std::vector<ChatMessage>& messages,
                               const LLMProfile& profile) = 0;
};

// OpenAI-compatible chat completions over HTTP(S). The bearer key is read
// from the profile's environment variable for each request.
class HttpChatTransport : public ChatTransport {
 public:
  std::string Complete(const std::vector<ChatMessage>& messages,
                       const LLMProfile& profile) override;
};

// Request body and response extraction, shared with tests.
std::string BuildChatRequestBody(const std::vector<ChatMessage>& messages,
                                 const LLMProfile& profile);
std::string ExtractChatReply(const std::string& response_body);

std::string BuildRulesPrompt(const GameConfig& config);

struct ParsedMove {
  std::optional<Action> action;
  std::string error;  // set when action is empty or illegal
};
// Strict grammar: optional surrounding whitespace, then "BID <q> <r>" or
// "CHALLENGE". Legality is checked against `legal`.
ParsedMove ParseMoveReply(const std::string& reply, const GameConfig& config,
                          const std::vector<Action>& legal);

// Challenge if legal, otherwise the lowest legal bid.
Action FallbackAction(const std::vector<Action>& legal);

using IncidentLog = std::function<void(const std::string& line)>;

class LLMSession {
 public:
  LLMSession(LLMProfile profile, GameConfig config,
             std::shared_ptr<ChatTransport> transport, IncidentLog log = {});

  // Always returns a legal action. Throws GatewayOutage after
  // profile.outage_after consecutive moves lost to transport failure.
  Action NextMove(const Observation& obs);
  // Appends one result message; after the 100th round of a context, clears
  // the context and re-sends the rules.
  void AnnounceResult(const RoundState& resolved, int seat);

  const std::vector<ChatMessage>& messages() const { return messages_; }
  int rounds_in_context() const { return rounds_in_context_; }
  std::int64_t rounds_played() const { return rounds_played_; }
  int context_resets() const { return context_resets_; }
  std::int64_t fallbacks() const { return fallbacks_; }
  const LLMProfile& profile() const { return profile_; }

 private:
  void ResetContext();
  std::string DescribeTurn(const Observation& obs);
  // Empty on transport failure after retries.
  std::optional<std::string> Ask();
  void Incident(const std::string& what, const std::string& reply);

  LLMProfile profile_;
  GameConfig config_;
  std::shared_ptr<ChatTransport> transport_;
  IncidentLog log_;
  std::vector<ChatMessage> messages_;
  int rounds_in_context_ = 0;
  std::int64_t rounds_played_ = 0;
  int context_resets_ = 0;
  std::int64_t fallbacks_ = 0;
  int consecutive_transport_failures_ = 0;
  bool round_open_ = false;
  std::size_t history_seen_ = 0;
};

class LLMAgent : public Agent {
 public:
  explicit LLMAgent(std::unique_ptr<LLMSession> session);
  std::string Name() const override { return "llm:" + session_->profile().name; }
  AgentPolicyOutput Act(const Observation& obs, std::uint64_t seed) override;
  void OnRoundEnd(const RoundState& resolved, int seat) override;
  LLMSession& session() { return *session_; }

 private:
  std::unique_ptr<LLMSession> session_;
};

// An AgentContext whose llm_factory builds LLMAgents from `profiles`.
AgentContext MakeLlmAgentContext(
    std::map<std::string, LLMProfile> profiles,
    std::function<std::shared_ptr<ChatTransport>()> transport_factory = {},
    IncidentLog log = {});

}  // namespace liars_poker

#endif  // LIARS_POKER_LLM_GATEWAY_H_
