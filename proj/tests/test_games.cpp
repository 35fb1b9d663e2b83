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

#include <fstream>
#include <set>

#include <json.hpp>

#include "oef/catalog.hpp"
#include "oef/games.hpp"
#include "oef/rng.hpp"
#include "oracles.hpp"

using namespace oef;

namespace {

// Games small enough to enumerate exhaustively in unit tests.
const std::vector<std::string> kEnumerableGames = {"kuhn2", "kuhn3", "leduc2",
                                                   "liars2", "liars3"};

History RandomPlayout(const Game& game, Rng& rng, int stop_after = -1) {
  History h = game.Root();
  int steps = 0;
  while (true) {
    NodeView v = h.View();
    if (v.IsTerminal() || (stop_after >= 0 && steps >= stop_after)) return h;
    std::vector<Action> legal = v.legal;
    h = h.Child(legal[rng.UniformBelow(legal.size())]);
    ++steps;
  }
}

}  // namespace

TEST_CASE("kuhn2 matches the hand-written rules oracle") {
  auto game = MakeGame("kuhn2");
  const auto* kuhn = dynamic_cast<const KuhnGame*>(game.get());
  REQUIRE(kuhn != nullptr);

  // Root: all ordered 2-card deals from 3 cards, each with probability 1/6.
  History root = game->Root();
  NodeView root_view = root.View();
  CHECK(root_view.IsChance());
  CHECK(root_view.legal.size() == 6);
  for (double p : root_view.chance_probs) CHECK(p == doctest::Approx(1.0 / 6).epsilon(1e-12));

  for (size_t deal = 0; deal < kuhn->Deals().size(); ++deal) {
    int card0 = kuhn->Deals()[deal][0];
    int card1 = kuhn->Deals()[deal][1];
    History dealt = root.Child(static_cast<Action>(deal));
    CHECK(dealt.LegalActions() == std::vector<Action>{0, 1});

    for (const auto& line : oracles::Kuhn2Lines()) {
      History h = dealt;
      for (char c : line.betting) h = h.Child(c == 'b' ? 1 : 0);
      REQUIRE(h.IsTerminal());
      std::vector<double> expect = oracles::Kuhn2Returns(card0, card1, line.betting);
      std::vector<double> got = h.Returns();
      CHECK(got[0] == doctest::Approx(expect[0]).epsilon(1e-12));
      CHECK(got[1] == doctest::Approx(expect[1]).epsilon(1e-12));
    }
  }
}

TEST_CASE("kuhn2 spec examples") {
  auto game = MakeGame("kuhn2");
  const auto* kuhn = dynamic_cast<const KuhnGame*>(game.get());

  // Deal (P0 = King = 2, P1 = Jack = 0), bet + call -> (+2, -2).
  size_t deal = 0;
  for (; deal < kuhn->Deals().size(); ++deal) {
    if (kuhn->Deals()[deal] == std::vector<int>{2, 0}) break;
  }
  History h = game->Root().Child(static_cast<Action>(deal)).Child(1).Child(1);
  CHECK(h.Returns() == std::vector<double>{2.0, -2.0});

  // pass-pass with P0 higher -> (+1, -1).
  History pp = game->Root().Child(static_cast<Action>(deal)).Child(0).Child(0);
  CHECK(pp.Returns() == std::vector<double>{1.0, -1.0});

  // Terminal histories refuse further play.
  CHECK_THROWS_WITH_AS(pp.LegalActions(), doctest::Contains("terminal"), Error);
  CHECK_THROWS_WITH_AS(pp.Child(0), doctest::Contains("terminal"), Error);

  // Illegal action at a player node.
  History dealt = game->Root().Child(static_cast<Action>(deal));
  CHECK_THROWS_WITH_AS(dealt.Child(5), doctest::Contains("illegal-action"), Error);
  // Returns before the end, chance queries at player nodes.
  CHECK_THROWS_WITH_AS(dealt.Returns(), doctest::Contains("non-terminal"), Error);
  CHECK_THROWS_WITH_AS(dealt.ChanceDistribution(), doctest::Contains("not-chance"),
                       Error);

  // P0's infoset after the deal ignores P1's card.
  std::set<std::string> keys;
  for (size_t d = 0; d < kuhn->Deals().size(); ++d) {
    if (kuhn->Deals()[d][0] != 1) continue;  // P0 holds the Queen
    keys.insert(game->Root().Child(static_cast<Action>(d)).Infoset(0).key);
  }
  CHECK(keys.size() == 1);

  // Joint tensor layout: two per-player blocks plus a 3-wide player block.
  CHECK(game->Dims().joint == 2 * game->Dims().per_player + 3);
}

TEST_CASE("prefix closure, partition, and zero-sum over full enumeration") {
  for (const std::string& id : kEnumerableGames) {
    CAPTURE(id);
    auto game = MakeGame(id);

    std::set<std::string> history_keys;
    std::map<std::string, std::vector<Action>> infoset_legal;
    ForEachHistory(*game, [&](const History& h, const NodeView& view) {
      // Every enumerated history must be reachable by chained Child calls,
      // i.e., every prefix is valid (Child throws otherwise).
      if (!h.actions().empty()) {
        History replay = game->Root();
        for (Action a : h.actions()) replay = replay.Child(a);
        CHECK(replay.actions() == h.actions());
      }
      if (view.IsTerminal()) {
        double total = 0;
        for (double x : view.payoffs) total += x;
        CHECK(std::abs(total) < 1e-9);
        return;
      }
      if (view.IsChance()) {
        double total = 0;
        for (double p : view.chance_probs) total += p;
        CHECK(std::abs(total - 1.0) < 1e-12);
        return;
      }
      CHECK(!view.legal.empty());
      CHECK(std::is_sorted(view.legal.begin(), view.legal.end()));
      // Partition: identical keys at decision nodes imply identical actors
      // and identical action sets.
      InfoSetKey key = game->Infoset(h.actions(), view.to_move);
      auto [it, inserted] = infoset_legal.try_emplace(key.key, view.legal);
      CHECK(it->second == view.legal);
    });
  }
}

TEST_CASE("golden tree counts") {
  std::ifstream in(std::string(OEF_TEST_DATA_DIR) + "/tree_counts.json");
  REQUIRE_MESSAGE(in.good(), "golden file missing; regenerate with tools/oef tree-stats");
  nlohmann::json golden = nlohmann::json::parse(in);

  for (const std::string& id : kEnumerableGames) {
    CAPTURE(id);
    auto game = MakeGame(id);
    TreeCounts counts = CountTree(*game);
    REQUIRE(golden.contains(id));
    CHECK(golden[id]["histories"].get<int64_t>() == counts.histories);
    CHECK(golden[id]["terminals"].get<int64_t>() == counts.terminals);
    int64_t infosets = 0;
    for (int64_t c : counts.infosets_per_player) infosets += c;
    CHECK(golden[id]["infosets"].get<int64_t>() == infosets);
  }

  // Regression anchors for standard 2-player Kuhn.
  TreeCounts kuhn2 = CountTree(*MakeGame("kuhn2"));
  CHECK(kuhn2.terminals == 30);
  CHECK(kuhn2.infosets_per_player == std::vector<int64_t>{6, 6});
}

TEST_CASE("encode/decode state round-trips on sampled histories") {
  for (const std::string& id : SupportedGameIds()) {
    CAPTURE(id);
    auto game = MakeGame(id);
    Rng rng(12345);
    std::set<std::string> seen_states;
    std::set<std::string> seen_tuples;
    for (int trial = 0; trial < 1000; ++trial) {
      History h = RandomPlayout(*game, rng,
                                trial % 3 == 0 ? static_cast<int>(rng.UniformBelow(6)) : -1);
      StateTuple s = game->EncodeState(h.actions());
      CHECK(static_cast<int>(s.joint.size()) == game->Dims().joint);
      for (double x : s.joint) CHECK((x == 0.0 || x == 1.0));

      StateTuple back = game->DecodeState(s.joint);
      CHECK(back.current_player == s.current_player);
      for (int p = 0; p < game->NumPlayers(); ++p) {
        CHECK(back.per_player_infosets[p].key == s.per_player_infosets[p].key);
      }
      // Injectivity: distinct state tuples have distinct tensors.
      std::string packed = PackTensor(s.joint);
      std::string tuple_id;
      for (const auto& k : s.per_player_infosets) tuple_id += k.key + ";";
      tuple_id += std::to_string(s.current_player);
      bool new_state = seen_states.insert(packed).second;
      bool new_tuple = seen_tuples.insert(tuple_id).second;
      CHECK(new_state == new_tuple);
    }
  }
}

TEST_CASE("tensor/key bijection over all reachable infosets") {
  for (const std::string& id : kEnumerableGames) {
    CAPTURE(id);
    auto game = MakeGame(id);
    Catalog catalog = BuildCatalog(*game);
    for (Player p = 0; p < game->NumPlayers(); ++p) {
      std::set<std::string> tensors;
      for (const auto& [key, info] : catalog.per_player[p]) {
        CHECK(tensors.insert(PackTensor(info.tensor)).second);
        auto parsed = game->ParseInfosetTensor(p, info.tensor);
        REQUIRE(parsed.has_value());
        CHECK(parsed->key == key);
      }
    }
  }
}

TEST_CASE("decode_state rejects malformed tensors") {
  auto game = MakeGame("kuhn2");
  CHECK_THROWS_WITH_AS(game->DecodeState(std::vector<double>(3, 0.0)),
                       doctest::Contains("bad-length"), Error);

  StateTuple s = game->EncodeState(game->Root().Child(0).actions());
  std::vector<double> bad = s.joint;
  bad[0] = 1.0;
  bad[1] = 1.0;  // two cards claimed for player 0
  CHECK_THROWS_WITH_AS(game->DecodeState(bad), doctest::Contains("undecodable"),
                       Error);

  std::vector<double> fractional = s.joint;
  fractional[0] = 0.5;
  CHECK_THROWS_WITH_AS(game->DecodeState(fractional),
                       doctest::Contains("undecodable"), Error);
}

TEST_CASE("liars dice rolls are per-player uniform and bids resolve") {
  auto game = MakeGame("liars3");
  History root = game->Root();
  NodeView v = root.View();
  CHECK(v.IsChance());
  CHECK(v.legal.size() == 3);
  for (double p : v.chance_probs) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));

  // Roll (face 2, face 0): bid "one face-3" (id 2) stands, a Liar call
  // loses for the caller.
  History h = root.Child(2).Child(0);
  CHECK(h.View().to_move == 0);
  h = h.Child(2);               // P0 bids (count 1, face 3)
  h = h.Child(6);               // P1 calls Liar
  CHECK(h.Returns() == std::vector<double>{1.0, -1.0});

  // Bid of two face-1 dice (id 3) with rolls (2, 0): only one die shows
  // face 1, so the caller wins.
  History lie = root.Child(2).Child(0).Child(3).Child(6);
  CHECK(lie.Returns() == std::vector<double>{-1.0, 1.0});

  // Bids must strictly increase.
  History bid = root.Child(2).Child(0).Child(3);
  CHECK_THROWS_WITH_AS(bid.Child(1), doctest::Contains("illegal-action"), Error);
}

TEST_CASE("phantom ttt hides unrevealed opponent placements") {
  auto game = MakeGame("pttt");
  // P0 plays 4; P1 attempts 4 (blocked, learns it), then plays 0.
  History h = game->Root().Child(4);
  CHECK(h.View().to_move == 1);
  History blocked = h.Child(4);
  CHECK(blocked.View().to_move == 1);  // blocked mover goes again
  History after = blocked.Child(0);
  CHECK(after.View().to_move == 0);

  // P0's view never saw P1's activity.
  CHECK(after.Infoset(0).key == h.Infoset(0).key);
  // P1's view recorded the failed probe and the placement.
  CHECK(after.Infoset(1).key == "P1|4x0+");

  // Blocked cells leave the mover's legal set.
  std::vector<Action> legal = blocked.LegalActions();
  CHECK(std::find(legal.begin(), legal.end(), 4) == legal.end());

  // A win line ends the game at +1/-1.
  History win = game->Root();
  for (Action a : {0, 3, 1, 4, 2}) win = win.Child(a);  // P0: 0,1,2
  CHECK(win.IsTerminal());
  CHECK(win.Returns() == std::vector<double>{1.0, -1.0});
}

TEST_CASE("phantom ttt encode/decode through blocked attempts") {
  auto game = MakeGame("pttt");
  Rng rng(777);
  for (int trial = 0; trial < 200; ++trial) {
    History h = RandomPlayout(*game, rng);
    StateTuple s = game->EncodeState(h.actions());
    StateTuple back = game->DecodeState(s.joint);
    CHECK(back.joint == s.joint);
  }
}

TEST_CASE("leduc pot arithmetic and splits") {
  auto game = MakeGame("leduc2");
  const auto* leduc = dynamic_cast<const LeducGame*>(game.get());
  REQUIRE(leduc != nullptr);

  // Find the deal (card0 = 0, card1 = 1): both rank 0 -> guaranteed split
  // unless someone folds.
  size_t deal = 0;
  for (; deal < leduc->Deals().size(); ++deal) {
    if (leduc->Deals()[deal] == std::vector<int>{0, 1}) break;
  }
  History h = game->Root().Child(static_cast<Action>(deal));
  // Round 1: raise, call. Pot 2 + 2 + 2 = 6.
  h = h.Child(LeducGame::kRaise).Child(LeducGame::kCall);
  REQUIRE(h.View().IsChance());
  // Public card rank 1 (id 2), round 2: check, check -> split.
  h = h.Child(2).Child(LeducGame::kCall).Child(LeducGame::kCall);
  REQUIRE(h.IsTerminal());
  CHECK(h.Returns() == std::vector<double>{0.0, 0.0});

  // Fold against a raise loses the ante plus called chips.
  History fold = game->Root()
                     .Child(static_cast<Action>(deal))
                     .Child(LeducGame::kRaise)
                     .Child(LeducGame::kFold);
  CHECK(fold.Returns() == std::vector<double>{1.0, -1.0});

  // Raise cap: after two raises in a round only fold/call remain.
  History capped = game->Root()
                       .Child(static_cast<Action>(deal))
                       .Child(LeducGame::kRaise)
                       .Child(LeducGame::kRaise);
  CHECK(capped.LegalActions() ==
        std::vector<Action>{LeducGame::kFold, LeducGame::kCall});

  // Paired hand beats a higher unpaired rank.
  size_t deal2 = 0;
  for (; deal2 < leduc->Deals().size(); ++deal2) {
    if (leduc->Deals()[deal2] == std::vector<int>{0, 5}) break;  // ranks 0, 2
  }
  History pair = game->Root().Child(static_cast<Action>(deal2));
  pair = pair.Child(LeducGame::kCall).Child(LeducGame::kCall);
  pair = pair.Child(1);  // public card id 1, rank 0: P0 pairs
  pair = pair.Child(LeducGame::kCall).Child(LeducGame::kCall);
  CHECK(pair.Returns() == std::vector<double>{1.0, -1.0});
}

TEST_CASE("game ids and factory errors") {
  for (const std::string& id : SupportedGameIds()) CHECK(MakeGame(id)->id() == id);
  CHECK_THROWS_WITH_AS(MakeGame("chess"), doctest::Contains("unknown-game"), Error);
}
