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

// lpoker: command-line front end for the lab.

#include <chrono>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "liars_poker/agents.h"
#include "liars_poker/bestresponse.h"
#include "liars_poker/combinatorics.h"
#include "liars_poker/engine.h"
#include "liars_poker/errors.h"
#include "liars_poker/evaluation.h"
#include "liars_poker/http_api.h"
#include "liars_poker/llm_gateway.h"
#include "liars_poker/neural.h"
#include "liars_poker/play_service.h"
#include "liars_poker/trainer.h"

namespace lp = liars_poker;

namespace {

std::vector<lp::GameConfig> TableConfigs() {
  return {{3, 3, 2}, {3, 3, 3}, {5, 5, 2}, {8, 10, 4}};
}

lp::TableFormat ParseTableFormat(const std::string& s) {
  if (s == "table") return lp::TableFormat::kTable;
  if (s == "csv") return lp::TableFormat::kCsv;
  throw lp::InvalidArgument("format must be table or csv");
}

lp::AgentContext MakeContext(const std::string& profiles_path) {
  if (profiles_path.empty()) return {};
  return lp::MakeLlmAgentContext(
      lp::LoadProfiles(profiles_path), {},
      [](const std::string& line) { std::cerr << line << "\n"; });
}

std::vector<std::string> SplitCommas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// ---- enumerate / probe ----------------------------------------------------

struct EnumerateArgs {
  int hand_length = 0;
  int cardinality = 0;
  int players = 0;
  std::string format = "table";
};

int RunEnumerate(const EnumerateArgs& a) {
  std::vector<lp::GameConfig> configs;
  if (a.hand_length || a.cardinality || a.players) {
    lp::GameConfig c;
    c.hand_length = a.hand_length ? a.hand_length : 3;
    c.digit_cardinality = a.cardinality ? a.cardinality : 3;
    c.num_players = a.players ? a.players : 2;
    c.Validate();
    configs.push_back(c);
  } else {
    configs = TableConfigs();
  }
  lp::WriteStateSpaceTable(lp::StateSpaceReport(configs), ParseTableFormat(a.format),
                           std::cout);
  return 0;
}

struct ProbeArgs {
  std::string config = "3x3x3";
  int quantity = 0;
  int rank = 1;
  int own = -1;
  std::string format = "table";
};

int RunProbe(const ProbeArgs& a) {
  const lp::GameConfig config = lp::ParseGameConfig(a.config);
  if (a.quantity > 0) {
    if (a.own < 0) throw lp::InvalidArgument("--own is required with --quantity");
    const lp::Bid bid{a.quantity, a.rank};
    const lp::Rational p = lp::BidHoldsProbabilityExact(config, bid, a.own);
    std::cout << "P(at least " << a.quantity << " of rank " << a.rank << " | own "
              << a.own << ") = " << p << " = " << std::fixed
              << std::setprecision(4) << static_cast<double>(p) << " ("
              << std::setprecision(0) << 100.0 * static_cast<double>(p)
              << "%)\n";
    return 0;
  }
  lp::WriteProbabilityTable(config, ParseTableFormat(a.format), std::cout);
  return 0;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string config = "3x3x2";
  std::string encoding = "counts";
  std::string hidden;
  lp::TrainerConfig t;
  int log_every = 100;
};

int RunTrain(TrainArgs a) {
  a.t.game = lp::ParseGameConfig(a.config);
  a.t.encoding = lp::ParseEncodingMode(a.encoding);
  if (!a.hidden.empty()) {
    a.t.hidden.clear();
    for (const std::string& w : SplitCommas(a.hidden)) a.t.hidden.push_back(std::stoi(w));
  }
  a.t.Validate();
  const auto start = std::chrono::steady_clock::now();
  const lp::TrainResult result = lp::Train(a.t, [&](const lp::StepMetrics& m) {
    if (a.log_every > 0 && (m.step % a.log_every == 0 || m.step == a.t.total_steps)) {
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::cout << "step " << m.step << " lr " << m.learning_rate << " loss "
                << m.loss.total << " entropy " << m.loss.entropy << " len "
                << m.mean_round_length << " unterminated "
                << m.unterminated_fraction << " " << std::fixed
                << std::setprecision(1) << secs << "s\n"
                << std::defaultfloat;
    }
  });
  std::cout << "wrote " << result.checkpoints.size() << " checkpoints to "
            << a.t.out_dir << "\n";
  return 0;
}

// ---- best-response ----------------------------------------------------------

struct BestResponseArgs {
  lp::BRConfig br;
  bool exact = false;
  bool raw = false;
  std::string out;
};

int RunBestResponse(const BestResponseArgs& a) {
  auto net = std::make_shared<const lp::PolicyNetwork>(lp::LoadCheckpoint(a.br.checkpoint));
  const lp::GameConfig game = net->config();
  if (a.exact) {
    lp::NetworkPolicyOracle oracle(net, !a.raw);
    const lp::ExactBestResponseResult r = lp::ExactBestResponse(oracle, a.br.position);
    std::cout << "exact best response, position " << a.br.position << ": "
              << std::setprecision(6) << r.value << " per round (" << r.nodes
              << " nodes)\n";
    return 0;
  }
  a.br.Validate(game);
  auto oracle = std::make_shared<const lp::NetworkPolicyOracle>(net, !a.raw);
  const lp::BRScoreSeries series =
      lp::TrainDqnBestResponse(a.br, oracle, [](const lp::BRScorePoint& p) {
        std::cout << "step " << p.step << " score " << p.score << " +/- "
                  << p.standard_error << " rolling " << p.rolling << " +/- "
                  << p.rolling_standard_error << "\n";
      });
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    lp::WriteScoreSeries(series, f);
  }
  std::cout << "final rolling score " << series.FinalRolling() << "\n";
  return 0;
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
  std::string agents = "baseline,random";
  std::string config = "3x3x2";
  int hands = 1000;
  bool rotate = true;
  std::string opener = "rotate";
  std::uint64_t seed = 1;
  std::string report = "text";
  std::string history;
  std::string llm_profiles;
  bool no_filter = false;
};

int RunEval(const EvalArgs& a) {
  lp::MatchSpec spec;
  spec.config = lp::ParseGameConfig(a.config);
  spec.agents = SplitCommas(a.agents);
  spec.hands = a.hands;
  spec.rotate_seats = a.rotate;
  spec.opener_rule = lp::ParseOpenerRule(a.opener);
  spec.seed = a.seed;
  spec.history_path = a.history;
  lp::AgentContext context = MakeContext(a.llm_profiles);
  context.policy_filter = !a.no_filter;
  const lp::MatchReport report = lp::RunMatch(spec, context);
  lp::WriteMatchReport(report,
                       a.report == "csv" ? lp::ReportFormat::kCsv : lp::ReportFormat::kText,
                       std::cout);
  return report.aborted ? 3 : 0;
}

// ---- play -----------------------------------------------------------------

struct PlayArgs {
  std::string config = "3x3x2";
  std::string seats = "human,baseline";
  std::string opener = "salomon";
  std::uint64_t seed = 1;
  int rounds = 0;
  std::string llm_profiles;
  std::string history_dir;
};

std::string Digits(const std::vector<int>& d) {
  std::string s;
  for (int x : d) s += std::to_string(x);
  return s;
}

void PrintResult(const lp::RoundResult& r, const std::vector<int>& ledger) {
  std::cout << "  showdown, round " << r.round << ":";
  for (std::size_t p = 0; p < r.hands.size(); ++p) {
    std::cout << " seat " << p << " [" << Digits(r.hands[p]) << "]";
  }
  std::cout << "\n  bid (" << r.final_bid.quantity << "," << r.final_bid.rank
            << ") by seat " << r.bidder << ": " << r.totals[r.final_bid.rank - 1]
            << " found, " << (r.bid_holds ? "bidder wins" : "challengers win")
            << "\n  ledger:";
  for (std::size_t p = 0; p < ledger.size(); ++p) {
    std::cout << " seat " << p << " " << std::showpos << ledger[p] << std::noshowpos;
  }
  std::cout << "\n";
}

void PrintView(const lp::PlayerView& v) {
  std::cout << "\nround " << v.round << ", seat " << v.seat << " ("
            << v.seats[v.seat] << "), hand [" << Digits(v.own_hand) << "], opener seat "
            << v.opener << "\n";
  for (const lp::HistoryEntry& e : v.history) {
    std::cout << "  seat " << e.player << ": " << e.action.ToString(v.config) << "\n";
  }
  if (v.standing_bid) {
    const lp::Bid b = lp::BidOfIndex(v.config, v.standing_bid->index);
    std::cout << "  standing bid (" << b.quantity << "," << b.rank << ") by seat "
              << v.standing_bid->bidder << (v.standing_bid->is_rebid ? " [rebid]" : "")
              << "\n";
  }
}

// "bid 4 2", "b 4 2", "4 2", "challenge", "c", "count".
std::optional<lp::Action> ParseInput(const std::string& line, const lp::GameConfig& config) {
  std::istringstream in(line);
  std::string word;
  if (!(in >> word)) return std::nullopt;
  if (word == "c" || word == "challenge" || word == "count") return lp::Action::Challenge();
  int q = 0, r = 0;
  if (word == "b" || word == "bid") {
    if (!(in >> q >> r)) return std::nullopt;
  } else {
    try {
      q = std::stoi(word);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    if (!(in >> r)) return std::nullopt;
  }
  if (q < 1 || q > config.MaxQuantity() || r < 1 || r > config.digit_cardinality) {
    return std::nullopt;
  }
  return lp::Action::MakeBid(lp::IndexOfBid(config, {q, r}));
}

int RunPlay(const PlayArgs& a) {
  lp::SessionConfig cfg;
  cfg.config = lp::ParseGameConfig(a.config);
  cfg.seats = SplitCommas(a.seats);
  cfg.opener_rule = lp::ParseOpenerRule(a.opener);
  cfg.seed = a.seed;
  cfg.max_rounds = a.rounds;
  lp::SessionManager manager(MakeContext(a.llm_profiles), a.history_dir);
  const std::string id = manager.CreateSession(cfg);
  std::int64_t cursor = 0;
  std::cout << "session " << id << ", " << cfg.config.ToString()
            << ". Enter 'bid q r' (or 'q r'), 'challenge', 'legal', 'quit'.\n";
  while (true) {
    for (const lp::SessionEvent& e : manager.Events(id, 0, cursor)) {
      cursor = e.seq;
      if (e.kind == "resolution") {
        lp::RoundResult r;
        r.round = e.payload["round"];
        r.hands = e.payload["hands"].get<std::vector<std::vector<int>>>();
        r.totals = e.payload["totals"].get<std::vector<int>>();
        r.final_bid = {e.payload["final_bid"]["q"], e.payload["final_bid"]["r"]};
        r.bidder = e.payload["bidder"];
        r.bid_holds = e.payload["bid_holds"];
        PrintResult(r, e.payload["ledger"].get<std::vector<int>>());
      } else if (e.kind == "session_end") {
        std::cout << "session " << e.payload["status"].get<std::string>() << ": "
                  << e.payload["detail"].get<std::string>() << "\n";
        return 0;
      }
    }
    const lp::PlayerView any = manager.GetView(id, 0);
    const int seat = any.to_act;
    const lp::PlayerView v = manager.GetView(id, seat);
    if (v.legal_actions.empty()) return 0;
    PrintView(v);
    std::cout << "seat " << seat << " to act> " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line) || line == "quit" || line == "q") return 0;
    if (line == "legal") {
      for (const lp::Action& act : v.legal_actions) {
        std::cout << "  " << act.ToString(v.config) << "\n";
      }
      continue;
    }
    const std::optional<lp::Action> action = ParseInput(line, v.config);
    if (!action) {
      std::cout << "could not read that move\n";
      continue;
    }
    try {
      manager.SubmitAction(id, seat, *action);
    } catch (const lp::ActionRejected& e) {
      std::cout << e.what() << "\n";
    }
  }
}

// ---- serve ----------------------------------------------------------------

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string history_dir = "sessions";
  std::string llm_profiles;
};

lp::HttpApiServer* g_server = nullptr;

int RunServe(const ServeArgs& a) {
  lp::SessionManager manager(MakeContext(a.llm_profiles), a.history_dir);
  lp::HttpApiServer server(manager);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->Stop();
  });
  std::cout << "serving on http://" << a.host << ":" << a.port << "\n" << std::flush;
  server.Run(a.host, a.port);
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Liar's Poker lab"};
  app.require_subcommand(1);

  EnumerateArgs enumerate;
  auto* en = app.add_subcommand("enumerate", "Canonical hands, bid sequences and round lengths");
  en->add_option("-H,--hand-length", enumerate.hand_length, "Digits per hand");
  en->add_option("-D,--cardinality", enumerate.cardinality, "Digit cardinality");
  en->add_option("-L,--players", enumerate.players, "Players");
  en->add_option("--format", enumerate.format, "table or csv")->capture_default_str();

  ProbeArgs probe;
  auto* pr = app.add_subcommand("probe", "Probability that a bid holds given own copies");
  pr->add_option("--config", probe.config, "HxDxL")->capture_default_str();
  pr->add_option("-q,--quantity", probe.quantity, "Bid quantity (omit for the full table)");
  pr->add_option("-r,--rank", probe.rank, "Bid rank")->capture_default_str();
  pr->add_option("-y,--own", probe.own, "Copies of the rank in own hand");
  pr->add_option("--format", probe.format, "table or csv")->capture_default_str();

  TrainArgs train;
  auto* tr = app.add_subcommand("train", "Regularized self-play training");
  tr->add_option("--config", train.config, "HxDxL")->capture_default_str();
  tr->add_option("--steps", train.t.total_steps, "Learner steps")->capture_default_str();
  tr->add_option("--trajectories", train.t.trajectories_per_step, "Rounds per step")
      ->capture_default_str();
  tr->add_option("--eta", train.t.eta, "Regularization strength")->capture_default_str();
  tr->add_option("--reference-interval", train.t.reference_interval,
                 "Steps between reference refreshes")
      ->capture_default_str();
  tr->add_option("--lr", train.t.lr_initial, "Initial learning rate")->capture_default_str();
  tr->add_option("--lr-floor", train.t.lr_floor, "Final learning rate")->capture_default_str();
  tr->add_option("--lr-decay-steps", train.t.lr_decay_steps, "0 = total steps")
      ->capture_default_str();
  tr->add_option("--reward-scale", train.t.reward_scale)->capture_default_str();
  tr->add_option("--entropy", train.t.entropy_coefficient)->capture_default_str();
  tr->add_option("--value-coefficient", train.t.value_coefficient)->capture_default_str();
  tr->add_option("--max-grad-norm", train.t.max_grad_norm)->capture_default_str();
  tr->add_option("--cutoff", train.t.cutoff, "Round length cutoff, 0 = default")
      ->capture_default_str();
  tr->add_option("--hidden", train.hidden, "Comma-separated widths (default 256,256)");
  tr->add_option("--encoding", train.encoding, "counts or digits")->capture_default_str();
  tr->add_option("--checkpoint-interval", train.t.checkpoint_interval)->capture_default_str();
  tr->add_option("--seed", train.t.seed)->capture_default_str();
  tr->add_option("--out", train.t.out_dir, "Output directory")->capture_default_str();
  tr->add_option("--log-every", train.log_every)->capture_default_str();

  BestResponseArgs br;
  auto* bs = app.add_subcommand("best-response", "Exploitability of a checkpoint");
  bs->add_option("--checkpoint", br.br.checkpoint, "Policy checkpoint")->required();
  bs->add_option("--position", br.br.position, "Exploiter seat relative to the opener")
      ->capture_default_str();
  bs->add_option("--steps", br.br.steps)->capture_default_str();
  bs->add_option("--games-per-step", br.br.games_per_step)->capture_default_str();
  bs->add_option("--lr", br.br.learning_rate)->capture_default_str();
  bs->add_option("--eval-every", br.br.eval_every)->capture_default_str();
  bs->add_option("--eval-rounds", br.br.eval_rounds)->capture_default_str();
  bs->add_option("--seed", br.br.seed)->capture_default_str();
  bs->add_option("--out", br.out, "Score series CSV");
  bs->add_flag("--exact", br.exact, "Exact tree best response (2 players)");
  bs->add_flag("--raw", br.raw, "Opponent samples the unfiltered policy");

  EvalArgs ev;
  auto* evc = app.add_subcommand("eval", "Head-to-head match report");
  evc->add_option("--agents", ev.agents,
                  "Comma-separated: random, baseline, policy:<ckpt>, llm:<profile>")
      ->capture_default_str();
  evc->add_option("--config", ev.config)->capture_default_str();
  evc->add_option("--hands", ev.hands)->capture_default_str();
  evc->add_flag("--rotate,!--no-rotate", ev.rotate, "Rotate seats every hand");
  evc->add_option("--opener", ev.opener, "rotate or salomon")->capture_default_str();
  evc->add_option("--seed", ev.seed)->capture_default_str();
  evc->add_option("--report", ev.report, "text or csv")->capture_default_str();
  evc->add_option("--history", ev.history, "Hand history JSONL path");
  evc->add_option("--llm-profiles", ev.llm_profiles, "LLM profiles JSON");
  evc->add_flag("--no-filter", ev.no_filter, "Sample policies without the play filter");

  PlayArgs play;
  auto* pl = app.add_subcommand("play", "Play at the terminal");
  pl->add_option("--config", play.config)->capture_default_str();
  pl->add_option("--seats", play.seats, "Comma-separated seat descriptors")
      ->capture_default_str();
  pl->add_option("--opener", play.opener, "salomon or rotate")->capture_default_str();
  pl->add_option("--seed", play.seed)->capture_default_str();
  pl->add_option("--rounds", play.rounds, "0 = until quit")->capture_default_str();
  pl->add_option("--llm-profiles", play.llm_profiles);
  pl->add_option("--history-dir", play.history_dir);

  ServeArgs serve;
  auto* sv = app.add_subcommand("serve", "HTTP play service");
  sv->add_option("--host", serve.host)->capture_default_str();
  sv->add_option("--port", serve.port)->capture_default_str();
  sv->add_option("--history-dir", serve.history_dir)->capture_default_str();
  sv->add_option("--llm-profiles", serve.llm_profiles);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*en) return RunEnumerate(enumerate);
    if (*pr) return RunProbe(probe);
    if (*tr) return RunTrain(train);
    if (*bs) return RunBestResponse(br);
    if (*evc) return RunEval(ev);
    if (*pl) return RunPlay(play);
    if (*sv) return RunServe(serve);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
