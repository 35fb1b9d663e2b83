// Copyright 2026 The OEF Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "matrix_game.hpp"
#include "oef/catalog.hpp"
#include "oef/games.hpp"
#include "oef/rng.hpp"
#include "oef/solvers.hpp"
#include "oracles.hpp"

using namespace oef;

namespace {

// The classic one-parameter Nash equilibrium of 2-player Kuhn at alpha=1/3.
Profile Kuhn2Equilibrium() {
  Profile profile = UniformProfile(2);
  auto& p0 = profile[0].table;
  p0["P0|0:"] = {2.0 / 3, 1.0 / 3};   // Jack: bluff 1/3
  p0["P0|1:"] = {1.0, 0.0};
  p0["P0|2:"] = {0.0, 1.0};           // King: always bet
  p0["P0|0:pb"] = {1.0, 0.0};         // Jack never calls
  p0["P0|1:pb"] = {1.0 / 3, 2.0 / 3};
  p0["P0|2:pb"] = {0.0, 1.0};
  auto& p1 = profile[1].table;
  p1["P1|0:p"] = {2.0 / 3, 1.0 / 3};
  p1["P1|1:p"] = {1.0, 0.0};
  p1["P1|2:p"] = {0.0, 1.0};
  p1["P1|0:b"] = {1.0, 0.0};
  p1["P1|1:b"] = {2.0 / 3, 1.0 / 3};
  p1["P1|2:b"] = {0.0, 1.0};
  return profile;
}

}  // namespace

TEST_CASE("regret matching") {
  CHECK(RegretMatching(std::vector<double>{2, 1, 1}) ==
        std::vector<double>{0.5, 0.25, 0.25});
  CHECK(RegretMatching(std::vector<double>{-1, -3}) ==
        std::vector<double>{0.5, 0.5});
  CHECK(RegretMatching(std::vector<double>{0, 0, 0}) ==
        std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK_THROWS_AS(RegretMatching(std::vector<double>{}), Error);

  // Output is a valid distribution for arbitrary finite inputs.
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    size_t n = 1 + rng.UniformBelow(6);
    std::vector<double> regrets(n);
    for (double& r : regrets) r = (rng.Uniform() - 0.5) * 200.0;
    std::vector<double> probs = RegretMatching(regrets);
    double total = 0;
    for (double p : probs) {
      CHECK(p >= 0.0);
      total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("nash_conv is zero at the known kuhn2 equilibrium") {
  auto game = MakeGame("kuhn2");
  Profile ne = Kuhn2Equilibrium();
  NashConvResult r = NashConv(*game, ne);
  CHECK(r.nash_conv == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(r.profile_values[0] == doctest::Approx(-1.0 / 18).epsilon(1e-9));
  CHECK(r.profile_values[1] == doctest::Approx(1.0 / 18).epsilon(1e-9));
}

TEST_CASE("best response and nash_conv match brute-force enumeration") {
  for (const std::string& id : {std::string("kuhn2"), std::string("liars2")}) {
    CAPTURE(id);
    auto game = MakeGame(id);

    // Uniform profile, every player.
    Profile uniform = UniformProfile(game->NumPlayers());
    StrategyFn uniform_fn = ProfileStrategy(uniform);
    for (Player p = 0; p < game->NumPlayers(); ++p) {
      double oracle = oracles::OracleBestResponseValue(*game, uniform_fn, p);
      CHECK(BestResponseValue(*game, uniform, p) ==
            doctest::Approx(oracle).epsilon(1e-9));
    }
    CHECK(NashConv(*game, uniform).nash_conv ==
          doctest::Approx(oracles::OracleNashConv(*game, uniform_fn)).epsilon(1e-9));

    // A handful of random behavioral profiles.
    Catalog catalog = BuildCatalog(*game);
    Rng rng(17);
    for (int trial = 0; trial < 3; ++trial) {
      Profile random_profile = UniformProfile(game->NumPlayers());
      for (Player p = 0; p < game->NumPlayers(); ++p) {
        for (const auto& [key, info] : catalog.per_player[p]) {
          std::vector<double> probs(info.legal.size());
          double total = 0;
          for (double& x : probs) total += (x = rng.Uniform() + 1e-3);
          for (double& x : probs) x /= total;
          random_profile[p].table[key] = probs;
        }
      }
      StrategyFn fn = ProfileStrategy(random_profile);
      for (Player p = 0; p < game->NumPlayers(); ++p) {
        CHECK(BestResponseValue(*game, random_profile, p) ==
              doctest::Approx(oracles::OracleBestResponseValue(*game, fn, p))
                  .epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("uniform kuhn2 exploitability matches enumeration exactly") {
  auto game = MakeGame("kuhn2");
  Profile uniform = UniformProfile(2);
  double oracle = oracles::OracleNashConv(*game, ProfileStrategy(uniform));
  // Summed over both players; each side's best response gains 11/24.
  CHECK(oracle == doctest::Approx(11.0 / 12).epsilon(1e-12));
  CHECK(NashConv(*game, uniform).nash_conv == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("best response dominates any fixed strategy") {
  auto game = MakeGame("kuhn2");
  Catalog catalog = BuildCatalog(*game);
  Profile opponent = UniformProfile(2);
  Rng rng(99);
  double br = BestResponseValue(*game, opponent, 0);
  for (int trial = 0; trial < 100; ++trial) {
    Profile candidate = opponent;
    for (const auto& [key, info] : catalog.per_player[0]) {
      std::vector<double> probs(info.legal.size());
      double total = 0;
      for (double& x : probs) total += (x = rng.Uniform());
      for (double& x : probs) x /= total;
      candidate[0].table[key] = probs;
    }
    double value = ExpectedUtilities(*game, candidate)[0];
    CHECK(br >= value - 1e-9);
  }
}

TEST_CASE("dominated matrix row: BR picks the max payoff") {
  // Column player fixed to the first column; row 1 dominates.
  MatrixGame game({{1, -2}, {3, -1}});
  Profile fixed = UniformProfile(2);
  fixed[1].table["P1|"] = {1.0, 0.0};
  CHECK(BestResponseValue(game, fixed, 0) == doctest::Approx(3.0));
}

TEST_CASE("vanilla CFR on kuhn2 approaches equilibrium") {
  auto game = MakeGame("kuhn2");
  RegretTable table(2);

  CfrIteration(*game, table);
  CHECK(table.iteration == 1);
  // First iteration acts from zero regrets: uniform play everywhere, so the
  // accumulated average strategy is uniform too.
  for (const Policy& policy : AveragePolicy(table)) {
    for (const auto& [key, probs] : policy.table) {
      for (double p : probs) {
        CHECK(p == doctest::Approx(1.0 / probs.size()).epsilon(1e-12));
      }
    }
  }

  double delta = 4.0;  // kuhn2 utility range: +2 .. -2
  for (int64_t t = 2; t <= 2000; ++t) {
    CfrIteration(*game, table);
    if (t == 10 || t == 100 || t == 1000 || t == 2000) {
      // Per-infoset regret bound from regret matching.
      for (Player p = 0; p < 2; ++p) {
        for (const auto& [key, entry] : table.players[p]) {
          double max_regret = 0;
          for (double r : entry.regret) max_regret = std::max(max_regret, r);
          CHECK(max_regret <=
                delta * std::sqrt(double(entry.legal.size())) * std::sqrt(double(t)) +
                    1e-9);
        }
      }
      // Two-player zero-sum: NashConv of averages bounded by total average
      // regret.
      double regret_sum = 0;
      for (Player p = 0; p < 2; ++p) {
        double player_regret = 0;
        for (const auto& [key, entry] : table.players[p]) {
          double best = 0;
          for (double r : entry.regret) best = std::max(best, r);
          player_regret += best;
        }
        regret_sum += player_regret / static_cast<double>(t);
      }
      double conv = NashConv(*game, AveragePolicy(table)).nash_conv;
      CHECK(conv <= 2 * regret_sum + 1e-6);
    }
  }
  NashConvResult final = NashConv(*game, AveragePolicy(table));
  CHECK(final.nash_conv < 0.02);
  CHECK(final.profile_values[0] == doctest::Approx(-1.0 / 18).epsilon(0.01));
}

TEST_CASE("CFR on matching pennies mixes to a half") {
  MatrixGame game({{1, -1}, {-1, 1}});
  RegretTable table(2);
  for (int t = 0; t < 1000; ++t) CfrIteration(game, table);
  Profile avg = AveragePolicy(table);
  CHECK(avg[0].table.at("P0|")[0] == doctest::Approx(0.5).epsilon(0.01));
  CHECK(avg[1].table.at("P1|")[0] == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("external sampling: exact regrets on a single-decision game") {
  // One decision for the traverser, a fixed opposing column.
  MatrixGame game({{1}, {0}});
  RegretTable table(2);
  Rng rng(5);
  double value = ExternalSamplingTraverse(game, 0, table, rng);
  // Uniform sigma: u_sigma = 0.5; regrets are u(a) - u_sigma exactly.
  CHECK(value == doctest::Approx(0.5));
  CHECK(table.players[0].at("P0|").regret == std::vector<double>{0.5, -0.5});

  // A traverser with no real decisions (single legal action) just passes
  // the sampled terminal utility through and accumulates no regret.
  RegretTable table2(2);
  double opponent_value = ExternalSamplingTraverse(game, 1, table2, rng);
  CHECK((opponent_value == doctest::Approx(-1.0) ||
         opponent_value == doctest::Approx(0.0)));
  for (const auto& [key, entry] : table2.players[1]) {
    for (double r : entry.regret) CHECK(r == 0.0);
  }
}

TEST_CASE("external sampling regrets are unbiased on kuhn2") {
  auto game = MakeGame("kuhn2");

  // Vanilla instantaneous regrets for player 0 from uniform strategies.
  RegretTable vanilla(2);
  {
    RegretTable scratch(2);
    CfrIteration(*game, scratch);
    // Player 0 swept first, so its regrets come from uniform play.
    vanilla.players[0] = scratch.players[0];
  }

  const int kSamples = 10000;
  std::map<std::string, std::vector<double>> sum, sum_sq;
  Rng rng(2024);
  for (int s = 0; s < kSamples; ++s) {
    RegretTable fresh(2);
    ExternalSamplingTraverse(*game, 0, fresh, rng);
    for (const auto& [key, entry] : fresh.players[0]) {
      auto& acc = sum[key];
      auto& acc2 = sum_sq[key];
      acc.resize(entry.regret.size());
      acc2.resize(entry.regret.size());
      for (size_t i = 0; i < entry.regret.size(); ++i) {
        acc[i] += entry.regret[i];
        acc2[i] += entry.regret[i] * entry.regret[i];
      }
    }
  }
  int checked = 0;
  for (const auto& [key, entry] : vanilla.players[0]) {
    auto it = sum.find(key);
    REQUIRE(it != sum.end());
    for (size_t i = 0; i < entry.regret.size(); ++i) {
      double mean = it->second[i] / kSamples;
      double var = sum_sq[key][i] / kSamples - mean * mean;
      double stderr3 = 3.0 * std::sqrt(std::max(var, 1e-12) / kSamples);
      CHECK(std::abs(mean - entry.regret[i]) <= stderr3 + 1e-9);
      ++checked;
    }
  }
  CHECK(checked == 12);  // 6 infosets x 2 actions
}

TEST_CASE("expected utilities: zero-sum and symmetric sanity") {
  for (const std::string& id : {std::string("kuhn2"), std::string("kuhn3"),
                                std::string("liars2")}) {
    auto game = MakeGame(id);
    std::vector<double> values =
        ExpectedUtilities(*game, UniformProfile(game->NumPlayers()));
    double total = 0;
    for (double v : values) total += v;
    CHECK(std::abs(total) < 1e-9);
  }
  // Symmetric matrix game under uniform play: symmetric (zero) values.
  MatrixGame pennies({{1, -1}, {-1, 1}});
  std::vector<double> values = ExpectedUtilities(pennies, UniformProfile(2));
  CHECK(values[0] == doctest::Approx(0.0));
  CHECK(values[1] == doctest::Approx(0.0));
}

TEST_CASE("missing policy entries evaluate as uniform") {
  auto game = MakeGame("kuhn2");
  Profile empty = UniformProfile(2);  // no table entries at all
  Profile explicit_uniform = UniformProfile(2);
  Catalog catalog = BuildCatalog(*game);
  for (Player p = 0; p < 2; ++p) {
    for (const auto& [key, info] : catalog.per_player[p]) {
      explicit_uniform[p].table[key] =
          std::vector<double>(info.legal.size(), 1.0 / info.legal.size());
    }
  }
  CHECK(ExpectedUtilities(*game, empty)[0] ==
        doctest::Approx(ExpectedUtilities(*game, explicit_uniform)[0]).epsilon(1e-12));
  CHECK(NashConv(*game, empty).nash_conv ==
        doctest::Approx(NashConv(*game, explicit_uniform).nash_conv).epsilon(1e-12));
}
