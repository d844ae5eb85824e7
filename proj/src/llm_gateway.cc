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

#include "liars_poker/llm_gateway.h"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "liars_poker/errors.h"

namespace liars_poker {

using nlohmann::json;

void LLMProfile::Validate() const {
  if (name.empty()) throw InvalidArgument("LLM profile needs a name");
  if (endpoint.empty()) throw InvalidArgument("LLM profile '" + name + "' needs an endpoint");
  if (model.empty()) throw InvalidArgument("LLM profile '" + name + "' needs a model");
  if (!(timeout_seconds > 0.0)) throw InvalidArgument("timeout must be positive");
  if (max_retries < 0 || transport_retries < 0 || outage_after < 1) {
    throw InvalidArgument("LLM retry counts out of range");
  }
}

std::map<std::string, LLMProfile> ParseProfiles(const std::string& json_text) {
  std::map<std::string, LLMProfile> out;
  try {
    const json doc = json::parse(json_text);
    for (const json& p : doc.at("profiles")) {
      LLMProfile profile;
      profile.name = p.at("name").get<std::string>();
      profile.endpoint = p.at("endpoint").get<std::string>();
      profile.model = p.at("model").get<std::string>();
      profile.api_key_env = p.value("api_key_env", "");
      profile.timeout_seconds = p.value("timeout_seconds", 60.0);
      profile.max_retries = p.value("max_retries", 3);
      profile.transport_retries = p.value("transport_retries", 1);
      profile.outage_after = p.value("outage_after", 3);
      profile.temperature = p.value("temperature", 0.0);
      profile.Validate();
      out[profile.name] = profile;
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed LLM profiles: ") + e.what());
  }
  return out;
}

std::map<std::string, LLMProfile> LoadProfiles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read LLM profiles " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseProfiles(buf.str());
}

std::string BuildChatRequestBody(const std::vector<ChatMessage>& messages,
                                 const LLMProfile& profile) {
  json msgs = json::array();
  for (const ChatMessage& m : messages) {
    msgs.push_back({{"role", m.role}, {"content", m.content}});
  }
  return json{{"model", profile.model},
              {"messages", msgs},
              {"temperature", profile.temperature}}
      .dump();
}

std::string ExtractChatReply(const std::string& response_body) {
  try {
    const json doc = json::parse(response_body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed chat response: ") + e.what());
  }
}

std::string HttpChatTransport::Complete(const std::vector<ChatMessage>& messages,
                                        const LLMProfile& profile) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(profile.endpoint, m, kUrl)) {
    throw TransportError("bad endpoint URL for profile " + profile.name);
  }
  httplib::Client client(m[1].str());
  const auto timeout = std::chrono::milliseconds(
      static_cast<long long>(profile.timeout_seconds * 1000.0));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers headers;
  if (!profile.api_key_env.empty()) {
    if (const char* key = std::getenv(profile.api_key_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  const std::string path = m[2].matched ? m[2].str() : "/";
  auto res = client.Post(path, headers, BuildChatRequestBody(messages, profile),
                         "application/json");
  if (!res) {
    throw TransportError("request failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("HTTP status " + std::to_string(res->status));
  }
  return ExtractChatReply(res->body);
}

std::string BuildRulesPrompt(const GameConfig& config) {
  const int h = config.hand_length;
  const int d = config.digit_cardinality;
  const int l = config.num_players;
  const int maxq = config.MaxQuantity();
  std::ostringstream o;
  o << "<html><body>\n"
    << "<h1>Liar's Poker</h1>\n"
    << "<p>Prompt version " << kPromptVersion << ".</p>\n"
    << "<h2>Setup</h2>\n<ul>\n"
    << "<li>There are " << l << " players, seated 0 to " << l - 1
    << ". Play passes from seat k to seat k+1, wrapping around.</li>\n"
    << "<li>Each player holds a private hand of " << h
    << " digits. Every digit is drawn independently and uniformly from 1 to "
    << d << ".</li>\n"
    << "<li>You see only your own hand until the count.</li>\n</ul>\n"
    << "<h2>Bids</h2>\n<ul>\n"
    << "<li>A bid (q, r) claims that at least q digits equal to r exist across "
       "all hands combined, yours included. q ranges from 1 to "
    << maxq << " and r from 1 to " << d << ".</li>\n"
    << "<li>Bids are ordered first by quantity, then by rank: (q, r) beats "
       "(q', r') when q &gt; q', or q = q' and r &gt; r'.</li>\n"
    << "<li>The opening player must bid. Every later bid must beat the "
       "standing bid.</li>\n"
    << "<li>Bidding (" << maxq << ", " << d
    << ") ends the round at once with a count.</li>\n</ul>\n"
    << "<h2>Challenges</h2>\n<ul>\n"
    << "<li>Instead of raising you may challenge the standing bid.</li>\n"
    << "<li>When every other player has challenged a bid in a row, its bidder "
       "decides: count, or rebid.</li>\n</ul>\n"
    << "<h2>Rebid</h2>\n<ul>\n"
    << "<li>A bidder whose bid was challenged by all " << l - 1
    << " other players may replace it once with any stronger bid; bidding "
       "then continues as normal.</li>\n"
    << "<li>Only one rebid is allowed per challenged bid: if a rebid is itself "
       "challenged by everyone, the count happens immediately.</li>\n"
    << "<li>Rebidding is the only extension in use. No other optional rules "
       "apply.</li>\n</ul>\n"
    << "<h2>Count and payouts</h2>\n<ul>\n"
    << "<li>At the count all hands are revealed and the digits equal to the "
       "bid rank are totalled.</li>\n"
    << "<li>If the total is at least the bid quantity, the bidder wins and "
       "collects 1 unit from each of the other "
    << l - 1
    << " players. Otherwise every other player collects 1 unit from the "
       "bidder.</li>\n</ul>\n"
    << "<h2 id=\"response-format\">Response format</h2>\n"
    << "<p>Answer every turn with exactly one line and nothing else:</p>\n"
    << "<pre>BID &lt;q&gt; &lt;r&gt;\nCHALLENGE</pre>\n"
    << "<p>Use BID q r to bid or rebid. Use CHALLENGE to challenge the "
       "standing bid, or to count when the decision is yours.</p>\n"
    << "</body></html>\n";
  return o.str();
}

namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string Truncate(const std::string& s, std::size_t n = 120) {
  std::string out = s.size() > n ? s.substr(0, n) + "..." : s;
  for (char& c : out) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::string LegalReminder(const GameConfig& config,
                          const std::vector<Action>& legal) {
  std::ostringstream o;
  o << "Legal replies:";
  int low = -1, high = -1;
  bool challenge = false;
  for (Action a : legal) {
    if (a.is_challenge()) {
      challenge = true;
    } else {
      if (low < 0) low = a.bid_index();
      high = a.bid_index();
    }
  }
  if (low >= 0) {
    const Bid lo = BidOfIndex(config, low);
    const Bid hi = BidOfIndex(config, high);
    o << " BID q r for any bid from (" << lo.quantity << ", " << lo.rank
      << ") up to (" << hi.quantity << ", " << hi.rank << ")";
  }
  if (challenge) o << (low >= 0 ? ";" : "") << " CHALLENGE";
  o << ".";
  return o.str();
}

std::string DescribeAction(const GameConfig& config, const HistoryEntry& e,
                           int self) {
  std::string who = e.player == self ? "You" : "Seat " + std::to_string(e.player);
  return who + ": " + e.action.ToString(config);
}

}  // namespace

ParsedMove ParseMoveReply(const std::string& reply, const GameConfig& config,
                          const std::vector<Action>& legal) {
  static const std::regex kBid(R"(^BID +([0-9]{1,6}) +([0-9]{1,6})$)");
  ParsedMove out;
  const std::string text = Trim(reply);
  std::smatch m;
  Action action = Action::Challenge();
  if (text == "CHALLENGE") {
    action = Action::Challenge();
  } else if (std::regex_match(text, m, kBid)) {
    const Bid bid{std::stoi(m[1].str()), std::stoi(m[2].str())};
    if (bid.quantity < 1 || bid.quantity > config.MaxQuantity() ||
        bid.rank < 1 || bid.rank > config.digit_cardinality) {
      out.error = "bid " + BidToString(bid) + " does not exist in this game";
      return out;
    }
    action = Action::MakeBid(IndexOfBid(config, bid));
  } else {
    out.error = "reply does not match BID <q> <r> or CHALLENGE";
    return out;
  }
  for (Action a : legal) {
    if (a == action) {
      out.action = action;
      return out;
    }
  }
  out.error = action.ToString(config) + " is not legal now";
  return out;
}

Action FallbackAction(const std::vector<Action>& legal) {
  if (legal.empty()) throw StateError("no legal action");
  for (Action a : legal) {
    if (a.is_challenge()) return a;
  }
  return legal.front();
}

LLMSession::LLMSession(LLMProfile profile, GameConfig config,
                       std::shared_ptr<ChatTransport> transport, IncidentLog log)
    : profile_(std::move(profile)),
      config_(config),
      transport_(std::move(transport)),
      log_(std::move(log)) {
  profile_.Validate();
  config_.Validate();
  if (!transport_) throw InvalidArgument("LLM session needs a transport");
  ResetContext();
}

void LLMSession::ResetContext() {
  messages_.clear();
  messages_.push_back({"system", BuildRulesPrompt(config_)});
  rounds_in_context_ = 0;
}

void LLMSession::Incident(const std::string& what, const std::string& reply) {
  if (!log_) return;
  std::ostringstream o;
  o << "[llm:" << profile_.name << "] round " << rounds_played_ + 1 << ": "
    << what;
  if (!reply.empty()) o << "; reply=\"" << Truncate(reply) << "\"";
  log_(o.str());
}

std::string LLMSession::DescribeTurn(const Observation& obs) {
  std::ostringstream o;
  if (!round_open_) {
    round_open_ = true;
    history_seen_ = 0;
    o << "Round " << rounds_played_ + 1 << " begins. You are seat "
      << obs.player << " of " << config_.num_players << "; seat "
      << obs.opener << " opens. Your hand:";
    for (int digit : obs.own_hand.digits()) o << " " << digit;
    o << ".\n";
  }
  for (std::size_t i = history_seen_; i < obs.history.size(); ++i) {
    o << DescribeAction(config_, obs.history[i], obs.player) << "\n";
  }
  history_seen_ = obs.history.size();
  if (obs.standing_bid) {
    const Bid b = BidOfIndex(config_, obs.standing_bid->index);
    o << "Standing bid: (" << b.quantity << ", " << b.rank << ") by "
      << (obs.standing_bid->bidder == obs.player
              ? std::string("you")
              : "seat " + std::to_string(obs.standing_bid->bidder))
      << (obs.standing_bid->is_rebid ? ", a rebid" : "") << ".\n";
  } else {
    o << "No bid yet; you open.\n";
  }
  if (obs.phase == Phase::kBidderDecision) {
    o << "Every other player challenged your bid. Reply CHALLENGE to count, "
         "or rebid once with a stronger BID.\n";
  }
  o << LegalReminder(config_, obs.legal_actions);
  return o.str();
}

std::optional<std::string> LLMSession::Ask() {
  for (int attempt = 0; attempt <= profile_.transport_retries; ++attempt) {
    try {
      std::string reply = transport_->Complete(messages_, profile_);
      consecutive_transport_failures_ = 0;
      return reply;
    } catch (const TransportError& e) {
      Incident(std::string("transport error: ") + e.what(), "");
    }
  }
  return std::nullopt;
}

Action LLMSession::NextMove(const Observation& obs) {
  if (!(obs.config == config_)) throw InvalidArgument("observation config mismatch");
  if (obs.legal_actions.empty()) throw StateError("LLM asked to act with no legal action");
  messages_.push_back({"user", DescribeTurn(obs)});
  std::string last_reply;
  for (int attempt = 0; attempt <= profile_.max_retries; ++attempt) {
    const std::optional<std::string> reply = Ask();
    if (!reply) {
      ++consecutive_transport_failures_;
      ++fallbacks_;
      if (consecutive_transport_failures_ >= profile_.outage_after) {
        Incident("gateway outage", "");
        throw GatewayOutage("LLM profile " + profile_.name + " unreachable after " +
                            std::to_string(consecutive_transport_failures_) +
                            " moves");
      }
      const Action fallback = FallbackAction(obs.legal_actions);
      Incident("transport retries exhausted; forfeit move " +
                   fallback.ToString(config_),
               "");
      return fallback;
    }
    last_reply = *reply;
    messages_.push_back({"assistant", *reply});
    const ParsedMove parsed = ParseMoveReply(*reply, config_, obs.legal_actions);
    if (parsed.action) return *parsed.action;
    if (attempt < profile_.max_retries) {
      messages_.push_back(
          {"user", "Reply not accepted: " + parsed.error +
                       ". Answer with exactly one line, BID <q> <r> or "
                       "CHALLENGE. " +
                       LegalReminder(config_, obs.legal_actions)});
    }
  }
  ++fallbacks_;
  const Action fallback = FallbackAction(obs.legal_actions);
  Incident("invalid replies after " + std::to_string(profile_.max_retries) +
               " retries; fallback " + fallback.ToString(config_),
           last_reply);
  return fallback;
}

void LLMSession::AnnounceResult(const RoundState& resolved, int seat) {
  const CountResult& c = resolved.count_result();
  const std::vector<int>& payouts = resolved.payouts();
  std::ostringstream o;
  o << "Round " << rounds_played_ + 1 << " is over. Totals:";
  for (int r = 1; r <= config_.digit_cardinality; ++r) {
    o << " " << r << "s=" << c.totals[r - 1];
  }
  o << ". Final bid (" << c.final_bid.quantity << ", " << c.final_bid.rank
    << ") by seat " << c.bidder << (c.bid_holds ? " holds" : " fails")
    << ". Winner" << (c.bid_holds ? "" : "s") << ":";
  for (int p = 0; p < config_.num_players; ++p) {
    if (payouts[p] > 0) o << " seat " << p;
  }
  o << " (" << (c.bid_holds ? "successful bid" : "successful challenge")
    << "). Your payout: " << (payouts[seat] > 0 ? "+" : "") << payouts[seat]
    << ".";
  messages_.push_back({"user", o.str()});
  round_open_ = false;
  history_seen_ = 0;
  ++rounds_played_;
  ++rounds_in_context_;
  if (rounds_in_context_ >= kRoundsPerContext) {
    ResetContext();
    ++context_resets_;
  }
}

LLMAgent::LLMAgent(std::unique_ptr<LLMSession> session)
    : session_(std::move(session)) {
  if (!session_) throw InvalidArgument("LLM agent needs a session");
}

AgentPolicyOutput LLMAgent::Act(const Observation& obs, std::uint64_t) {
  AgentPolicyOutput out;
  out.action = session_->NextMove(obs);
  out.probabilities.assign(obs.config.NumActions(), 0.0);
  out.probabilities[out.action.Id(obs.config)] = 1.0;
  return out;
}

void LLMAgent::OnRoundEnd(const RoundState& resolved, int seat) {
  session_->AnnounceResult(resolved, seat);
}

AgentContext MakeLlmAgentContext(
    std::map<std::string, LLMProfile> profiles,
    std::function<std::shared_ptr<ChatTransport>()> transport_factory,
    IncidentLog log) {
  AgentContext context;
  context.llm_factory = [profiles = std::move(profiles),
                         transport_factory = std::move(transport_factory),
                         log = std::move(log)](const std::string& name,
                                               const GameConfig& config)
      -> std::unique_ptr<Agent> {
    const auto it = profiles.find(name);
    if (it == profiles.end()) {
      throw InvalidArgument("unknown LLM profile '" + name + "'");
    }
    std::shared_ptr<ChatTransport> transport =
        transport_factory ? transport_factory()
                          : std::make_shared<HttpChatTransport>();
    return std::make_unique<LLMAgent>(
        std::make_unique<LLMSession>(it->second, config, transport, log));
  };
  return context;
}

}  // namespace liars_poker
