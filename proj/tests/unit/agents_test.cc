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

#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "doctest.h"
#include "liars_poker/agents.h"
#include "liars_poker/combinatorics.h"
#include "liars_poker/errors.h"

namespace lp = liars_poker;

namespace {

lp::RoundState FromCounts(const lp::GameConfig& c,
                          const std::vector<std::vector<int>>& counts) {
  std::vector<lp::Hand> hands;
  for (const auto& k : counts) hands.push_back(lp::Hand::FromCounts(c, k));
  return lp::RoundState(c, hands, 0);
}

void CheckDistribution(const lp::AgentPolicyOutput& out, const lp::Observation& obs) {
  double sum = 0.0;
  std::vector<bool> legal(obs.config.NumActions(), false);
  for (const lp::Action& a : obs.legal_actions) legal[a.Id(obs.config)] = true;
  for (int id = 0; id < obs.config.NumActions(); ++id) {
    if (!legal[id]) CHECK(out.probabilities[id] == 0.0);
    sum += out.probabilities[id];
  }
  CHECK(std::abs(sum - 1.0) < 1e-9);
  CHECK(legal[out.action.Id(obs.config)]);
}

// Independent recomputation of the greedy move values.
double ExpectedValue(const lp::Observation& obs, const lp::Action& a) {
  const lp::GameConfig& c = obs.config;
  const double l1 = c.num_players - 1;
  auto p = [&](int index) {
    const lp::Bid b = lp::BidOfIndex(c, index);
    return static_cast<double>(
        lp::BidHoldsProbabilityExact(c, b, obs.own_hand.CountOf(b.rank)));
  };
  if (a.is_bid()) return l1 * (2 * p(a.bid_index()) - 1);
  const double ps = p(obs.standing_bid->index);
  if (obs.phase == lp::Phase::kBidderDecision) return l1 * (2 * ps - 1);
  return 1 - 2 * ps;
}

}  // namespace

TEST_CASE("random agent is uniform and seeded") {
  const lp::GameConfig c{3, 3, 2};
  const lp::Observation obs = lp::MakeObservation(lp::RoundState::Deal(c, 1, 0), 0);
  lp::RandomAgent agent;
  const auto out = agent.Act(obs, 5);
  for (int id = 0; id < 18; ++id) CHECK(out.probabilities[id] == doctest::Approx(1.0 / 18));
  CheckDistribution(out, obs);
  CHECK(agent.Act(obs, 5).action == out.action);
  std::vector<int> hits(c.NumActions(), 0);
  for (std::uint64_t s = 0; s < 3600; ++s) ++hits[agent.Act(obs, s).action.Id(c)];
  for (int id = 0; id < 18; ++id) CHECK(hits[id] > 100);
}

TEST_CASE("baseline opening with three ones") {
  const lp::GameConfig c{3, 3, 2};
  const lp::RoundState s = FromCounts(c, {{3, 0, 0}, {1, 1, 1}});
  const lp::Observation obs = lp::MakeObservation(s, 0);
  lp::BaselineAgent agent;
  const auto values = lp::BaselineAgent::MoveValues(obs);
  for (int q = 1; q <= 3; ++q) {
    const int idx = lp::IndexOfBid(c, {q, 1});
    CHECK(values[idx].ev == doctest::Approx(1.0));
  }
  const auto out = agent.Act(obs, 1);
  CHECK(out.action == lp::Action::MakeBid(lp::IndexOfBid(c, {1, 1})));
  CHECK(agent.Act(obs, 999).action == out.action);
  CheckDistribution(out, obs);
}

TEST_CASE("baseline challenges an impossible bid") {
  const lp::GameConfig c{3, 3, 2};
  lp::RoundState s = FromCounts(c, {{3, 0, 0}, {2, 1, 0}});
  s.ApplyAction(lp::Action::MakeBid(lp::IndexOfBid(c, {5, 3})));
  // (6,3) is maximal and would resolve, so test against (5,3) with no 3s.
  const lp::Observation obs = lp::MakeObservation(s, 1);
  const auto values = lp::BaselineAgent::MoveValues(obs);
  lp::BaselineAgent agent;
  CHECK(agent.Act(obs, 0).action == lp::Action::Challenge());
  for (const auto& v : values) {
    if (v.action.is_challenge()) CHECK(v.ev == doctest::Approx(1.0));
  }
}

TEST_CASE("baseline picks a maximal expected value everywhere") {
  std::mt19937_64 rng(3);
  for (const lp::GameConfig& c : {lp::GameConfig{3, 3, 2}, lp::GameConfig{3, 3, 3},
                                  lp::GameConfig{2, 4, 2}}) {
    lp::BaselineAgent agent;
    for (int game = 0; game < 300; ++game) {
      lp::RoundState s = lp::RoundState::Deal(c, rng(), game % c.num_players);
      while (!s.IsResolved()) {
        const lp::Observation obs = lp::MakeObservation(s, s.to_act());
        const auto out = agent.Act(obs, rng());
        CheckDistribution(out, obs);
        const double chosen = ExpectedValue(obs, out.action);
        for (const lp::Action& a : obs.legal_actions) {
          CHECK(chosen >= ExpectedValue(obs, a) - 1e-12);
        }
        const auto legal = s.LegalActions();
        s.ApplyAction(rng() % 2 ? out.action : legal[rng() % legal.size()]);
      }
    }
  }
}

TEST_CASE("play filter arithmetic") {
  const std::vector<double> p = {0.02, 0.49, 0.49};
  const auto f = lp::ApplyPlayFilter(p);
  CHECK(f[0] == 0.0);
  CHECK(f[1] == 0.5);
  CHECK(f[2] == 0.5);
  CHECK(f[1] * 32 == 16);

  const std::vector<double> tiny(40, 1.0 / 40);
  for (double v : lp::ApplyPlayFilter(tiny)) CHECK(v == 0.0);

  std::mt19937_64 rng(9);
  std::gamma_distribution<double> gamma(0.3, 1.0);
  for (int t = 0; t < 5000; ++t) {
    std::vector<double> x(1 + rng() % 30);
    double sum = 0;
    for (double& v : x) sum += v = gamma(rng);
    if (sum == 0) continue;
    for (double& v : x) v /= sum;
    const auto once = lp::ApplyPlayFilter(x);
    const auto twice = lp::ApplyPlayFilter(once);
    CHECK(once == twice);
    const double total = std::accumulate(once.begin(), once.end(), 0.0);
    if (total == 0.0) continue;
    CHECK(std::abs(total - 1.0) < 1e-9);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (once[i] > 0) {
        CHECK(once[i] >= lp::kPlayThreshold);
        CHECK(x[i] >= lp::kPlayThreshold);
      }
    }
  }
}

TEST_CASE("policy agent with uniform logits chooses uniformly") {
  const lp::GameConfig c{3, 3, 2};
  auto net = std::make_shared<lp::PolicyNetwork>(
      lp::EncodingSpec{c, lp::EncodingMode::kCanonicalCounts}, std::vector<int>{8}, 1);
  net->mlp().Unflatten(std::vector<float>(net->mlp().NumParameters(), 0.0f));
  lp::PolicyAgent agent(net);
  // k = 1 would need the maximal bid standing, which resolves at once.
  for (int k = 2; k <= 18; ++k) {
    // Standing bid leaves k legal actions.
    lp::RoundState t = lp::RoundState::Deal(c, 2, 0);
    if (k < 18) t.ApplyAction(lp::Action::MakeBid(c.NumBids() - k));
    const lp::Observation obs = lp::MakeObservation(t, t.to_act());
    const auto out = agent.Act(obs, 3);
    CheckDistribution(out, obs);
    for (const lp::Action& a : obs.legal_actions) {
      CHECK(out.probabilities[a.Id(c)] == doctest::Approx(1.0 / obs.legal_actions.size()));
    }
  }
}

TEST_CASE("policy agent falls back to argmax when the filter empties support") {
  const lp::GameConfig c{8, 10, 4};
  auto net = std::make_shared<lp::PolicyNetwork>(
      lp::EncodingSpec{c, lp::EncodingMode::kCanonicalCounts}, std::vector<int>{4}, 1);
  net->mlp().Unflatten(std::vector<float>(net->mlp().NumParameters(), 0.0f));
  net->mlp().policy_head().bias(7) = 0.5f;
  lp::PolicyAgent filtered(net);
  const lp::Observation obs = lp::MakeObservation(lp::RoundState::Deal(c, 4, 0), 0);
  const auto out = filtered.Act(obs, 1);
  CHECK(out.action == lp::Action::MakeBid(7));
  CHECK(out.note == "argmax fallback");
  CheckDistribution(out, obs);
  lp::PolicyAgent raw(net, false);
  const auto r = raw.Act(obs, 1);
  CheckDistribution(r, obs);
  CHECK(r.probabilities[0] > 0.0);
}

TEST_CASE("agent descriptors") {
  const lp::GameConfig c{3, 3, 2};
  CHECK(lp::MakeAgent("random", c)->Name() == "random");
  CHECK(lp::MakeAgent("baseline", c)->Name() == "baseline");
  CHECK(lp::MakeAgent("human", c)->IsHuman());
  CHECK_THROWS_AS(lp::MakeAgent("wizard", c), lp::InvalidArgument);
  CHECK_THROWS_AS(lp::MakeAgent("llm:none", c), lp::InvalidArgument);
  CHECK_THROWS(lp::MakeAgent("policy:/nonexistent/ckpt.bin", c));

  const auto path = std::filesystem::temp_directory_path() / "lpoker_agents_ckpt.bin";
  lp::SaveCheckpoint(lp::PolicyNetwork({c, lp::EncodingMode::kCanonicalCounts}, {8}, 2),
                     path.string());
  auto agent = lp::MakeAgent("policy:" + path.string(), c);
  const lp::Observation obs = lp::MakeObservation(lp::RoundState::Deal(c, 4, 0), 0);
  CheckDistribution(agent->Act(obs, 1), obs);
  CHECK_THROWS(lp::MakeAgent("policy:" + path.string(), lp::GameConfig{5, 5, 2}));
  std::filesystem::remove(path);

  lp::HumanAgent human;
  CHECK_THROWS_AS(human.Act(obs, 0), lp::StateError);
}
