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
#include <random>

#include "doctest.h"
#include "liars_poker/errors.h"
#include "liars_poker/hand_history.h"

namespace lp = liars_poker;

namespace {

lp::RoundState RandomRound(const lp::GameConfig& c, std::uint64_t seed) {
  lp::RoundState s = lp::RoundState::Deal(c, seed, static_cast<int>(seed % c.num_players));
  std::mt19937_64 rng(seed);
  while (!s.IsResolved()) {
    const auto legal = s.LegalActions();
    s.ApplyAction(legal[rng() % legal.size()]);
  }
  return s;
}

}  // namespace

TEST_CASE("hand records round-trip and replay") {
  const lp::GameConfig c{3, 3, 3};
  const std::string path =
      (std::filesystem::temp_directory_path() / "lpoker_history_test.jsonl").string();
  std::filesystem::remove(path);
  std::vector<lp::RoundState> rounds;
  {
    lp::HandHistoryWriter writer(path);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      rounds.push_back(RandomRound(c, seed));
      lp::HandRecord r = lp::MakeHandRecord(rounds.back(), lp::UtcTimestamp(),
                                            lp::UtcTimestamp());
      r.extra["tag"] = static_cast<int>(seed);
      writer.Append(r);
    }
  }
  const auto records = lp::ReadHandHistory(path);
  REQUIRE(records.size() == 50);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const lp::HandRecord& r = records[i];
    CHECK(r.payouts == rounds[i].payouts());
    CHECK(r.totals == rounds[i].count_result().totals);
    CHECK(r.extra["tag"] == static_cast<int>(i + 1));
    const lp::RoundState replay = lp::ReplayHandRecord(r);
    CHECK(replay.payouts() == r.payouts);
    CHECK(replay.history().size() == rounds[i].history().size());
    CHECK(lp::ToJson(r)["schema"] == lp::kHandRecordSchema);
  }
  std::filesystem::remove(path);
}

TEST_CASE("unresolved rounds cannot be recorded and bad records are refused") {
  const lp::GameConfig c{3, 3, 2};
  const lp::RoundState s = lp::RoundState::Deal(c, 3, 0);
  CHECK_THROWS_AS(lp::MakeHandRecord(s, "", ""), lp::StateError);
  nlohmann::json j = lp::ToJson(lp::MakeHandRecord(RandomRound(c, 4), "a", "b"));
  j.erase("payouts");
  CHECK_THROWS_AS(lp::HandRecordFromJson(j), lp::InvalidArgument);
  CHECK(lp::UtcTimestamp().size() == 24);
}
