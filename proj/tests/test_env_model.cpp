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

#include <cstdio>
#include <filesystem>

#include "oef/catalog.hpp"
#include "oef/games.hpp"
#include "oef/model_game.hpp"
#include "oef/solvers.hpp"

using namespace oef;

namespace {

Dataset Kuhn2Hybrid(const Game& game, int64_t size, uint64_t seed) {
  RegretTable table(2);
  for (int t = 0; t < 600; ++t) CfrIteration(game, table);
  Dataset random_ds = GenerateRandom(game, size, seed);
  Dataset expert_ds = GenerateExpert(game, size, seed + 1, AveragePolicy(table));
  return MixHybrid(random_ds, expert_ds, 0.5, size, seed + 2);
}

TrainConfig EnvCfg(int epochs, uint64_t seed = 12) {
  TrainConfig cfg;
  cfg.hidden_size = 32;
  cfg.batch_size = 32;
  cfg.epochs = epochs;
  cfg.learning_rate = 0.01;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("trained model reproduces held-out kuhn2 transitions") {
  auto game = MakeGame("kuhn2");
  Dataset ds = Kuhn2Hybrid(*game, 3000, 50);

  // 90/10 split.
  Rng rng(123);
  std::vector<int> order(ds.records.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  rng.Shuffle(order);
  size_t held = order.size() / 10;
  Dataset train = ds;
  train.records.clear();
  std::vector<TransitionRecord> held_out;
  for (size_t i = 0; i < order.size(); ++i) {
    (i < held ? held_out : train.records).push_back(ds.records[order[i]]);
  }
  train.meta.size = static_cast<int64_t>(train.records.size());

  EnvModel model = TrainEnv(*game, train, EnvCfg(500));
  auto mg = MakeLearnedModelGame(game, model);
  FidelityReport report = EvaluateFidelity(*mg, held_out);
  CHECK(report.next_state_match >= 0.99);
  CHECK(report.terminal_reward_match >= 0.99);
  CHECK(report.legal_mask_match >= 0.95);

  // Training-set replay is at least as good.
  FidelityReport on_train = EvaluateFidelity(*mg, train.records);
  CHECK(on_train.next_state_match >= 0.99);

  // Decode-fault rate stays under the solver cap.
  CHECK(mg->FaultRate() < 0.05);

  // Non-terminal predictions carry exactly-zero rewards.
  for (const TransitionRecord& rec : held_out) {
    ModelGame::Step step = mg->ApplyAction(rec.state, rec.action);
    if (!step.terminal) {
      CHECK(step.rewards == std::vector<double>(2, 0.0));
    }
  }

  // Chance head at the root: close to the uniform 1/6 deal.
  std::vector<double> chance =
      mg->ChanceDistribution(mg->RootState(), mg->RootLegalMask());
  double tv = 0, total = 0;
  for (double p : chance) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  for (double p : chance) tv += std::abs(p - 1.0 / 6) / 2;
  CHECK(tv < 0.1);
}

TEST_CASE("model chance with a single legal action is a point mass") {
  auto game = MakeGame("kuhn2");
  Dataset ds = Kuhn2Hybrid(*game, 400, 60);
  EnvModel model = TrainEnv(*game, ds, EnvCfg(20));
  auto mg = MakeLearnedModelGame(game, model);
  std::vector<uint8_t> one(game->MaxActions(), 0);
  one[3] = 1;
  std::vector<double> probs = mg->ChanceDistribution(mg->RootState(), one);
  CHECK(probs[3] == doctest::Approx(1.0));
}

TEST_CASE("undertrained model still yields valid states via fallback") {
  auto game = MakeGame("kuhn2");
  Dataset ds = Kuhn2Hybrid(*game, 300, 70);
  EnvModel model = TrainEnv(*game, ds, EnvCfg(2));
  auto mg = MakeLearnedModelGame(game, model);

  for (const TransitionRecord& rec : ds.records) {
    ModelGame::Step step = mg->ApplyAction(rec.state, rec.action);
    // Whatever the net predicts, the decoded state must parse.
    CHECK_NOTHROW(game->DecodeState(step.next_state));
    if (!step.terminal) {
      int bits = 0;
      for (uint8_t b : step.legal_mask) bits += b;
      CHECK(bits >= 1);  // top-1 fallback guarantees one action
    }
  }
  CHECK(mg->StepCount() > 0);
  CHECK(mg->DecodeFaults() >= 0);
}

TEST_CASE("perfect model game mirrors the engine exactly") {
  for (const std::string& id : {std::string("kuhn2"), std::string("liars2")}) {
    CAPTURE(id);
    auto game = MakeGame(id);
    auto mg = MakePerfectModelGame(game);

    // Random walks agree with the engine step by step.
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
      History h = game->Root();
      std::vector<double> state = mg->RootState();
      while (!h.IsTerminal()) {
        NodeView view = h.View();
        Action a = view.legal[rng.UniformBelow(view.legal.size())];
        ModelGame::Step step = mg->ApplyAction(state, a);
        History child = h.Child(a);
        CHECK(step.next_state == game->EncodeState(child.actions()).joint);
        CHECK(step.terminal == child.IsTerminal());
        if (step.terminal) CHECK(step.rewards == child.Returns());
        h = std::move(child);
        state = step.next_state;
      }
    }

    // Meta-consistency: tree-walk evaluation on the model equals the exact
    // solver evaluation.
    ModelTree tree(*mg, game->MaxEpisodeLength() + 2, 4000000);
    Profile uniform = UniformProfile(game->NumPlayers());
    std::vector<double> via_model =
        ExpectedUtilities(tree, ProfileStrategy(uniform));
    std::vector<double> exact = ExpectedUtilities(*game, uniform);
    for (int p = 0; p < game->NumPlayers(); ++p) {
      CHECK(via_model[p] == doctest::Approx(exact[p]).epsilon(1e-9));
    }
    for (Player p = 0; p < game->NumPlayers(); ++p) {
      CHECK(BestResponse(tree, ProfileStrategy(uniform), p).value ==
            doctest::Approx(BestResponseValue(*game, uniform, p)).epsilon(1e-9));
    }
    CHECK(mg->DecodeFaults() == 0);
  }
}

TEST_CASE("model tree depth cap truncates and counts faults") {
  auto game = MakeGame("kuhn2");
  auto mg = MakePerfectModelGame(game);
  ModelTree tree(*mg, /*depth_cap=*/1, /*node_budget=*/1000);
  ModelTree::Node root = tree.Root();
  ModelTree::Node deal = tree.Child(root, 0);
  ModelTree::Node cut = tree.Child(deal, 0);  // depth 2 > cap
  CHECK(cut.view.IsTerminal());
  CHECK(cut.view.payoffs == std::vector<double>{0.0, 0.0});
  CHECK(mg->DecodeFaults() == 1);

  // Node budget enforcement.
  auto mg2 = MakePerfectModelGame(game);
  ModelTree small(*mg2, 10, /*node_budget=*/3);
  ModelTree::Node r = small.Root();
  small.Child(r, 0);
  small.Child(r, 1);
  small.Child(r, 2);
  CHECK_THROWS_WITH_AS(small.Child(r, 3), doctest::Contains("model-blowup"),
                       Error);
}

TEST_CASE("env model serialization round trip with sidecar") {
  auto game = MakeGame("kuhn2");
  Dataset ds = Kuhn2Hybrid(*game, 400, 80);
  EnvModel model = TrainEnv(*game, ds, EnvCfg(30));
  std::string path =
      (std::filesystem::temp_directory_path() / "oef_env.json").string();
  SaveEnvModel(model, path);
  EnvModel back = LoadEnvModel(path);
  CHECK(back.net.ParamHash() == model.net.ParamHash());
  CHECK(back.observed_states == model.observed_states);
  CHECK(back.root_legal_mask == model.root_legal_mask);

  // Same dynamics after reload.
  auto mg1 = MakeLearnedModelGame(game, model);
  auto mg2 = MakeLearnedModelGame(game, back);
  for (int i = 0; i < 20; ++i) {
    const TransitionRecord& rec = ds.records[i * 7 % ds.records.size()];
    ModelGame::Step s1 = mg1->ApplyAction(rec.state, rec.action);
    ModelGame::Step s2 = mg2->ApplyAction(rec.state, rec.action);
    CHECK(s1.next_state == s2.next_state);
    CHECK(s1.terminal == s2.terminal);
  }
  std::remove(path.c_str());
  std::remove((path + ".sidecar.json").c_str());
}
