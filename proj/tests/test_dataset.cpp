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
#include <fstream>
#include <map>
#include <sstream>

#include "oef/dataset.hpp"
#include "oef/games.hpp"
#include "oef/solvers.hpp"
#include "oracles.hpp"

using namespace oef;

namespace {

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string FileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Per-infoset empirical action frequencies over player records.
std::map<std::string, std::map<Action, int64_t>> ActionCounts(
    const Game& game, const std::vector<TransitionRecord>& records) {
  std::map<std::string, std::map<Action, int64_t>> counts;
  for (const TransitionRecord& rec : records) {
    if (rec.actor < 0) continue;
    auto key = game.ParseInfosetTensor(
        rec.actor, std::span<const double>(rec.state).subspan(
                       game.InfosetOffset(rec.actor), game.Dims().per_player));
    REQUIRE(key.has_value());
    ++counts[key->key][rec.action];
  }
  return counts;
}

}  // namespace

TEST_CASE("random dataset: determinism, validity, uniform frequencies") {
  auto game = MakeGame("kuhn2");
  Dataset ds = GenerateRandom(*game, 500, 7);
  CHECK(ds.records.size() == 500);
  CHECK(ds.meta.kind == "random");
  ValidateDataset(*game, ds);

  // Byte-identical on regeneration, also across worker counts.
  std::string p1 = TempPath("oef_ds_a.jsonl"), p2 = TempPath("oef_ds_b.jsonl");
  SaveDataset(ds, p1);
  SaveDataset(GenerateRandom(*game, 500, 7, /*workers=*/4), p2);
  CHECK(FileBytes(p1) == FileBytes(p2));

  // Uniform play: chi-squared per infoset with >= 100 visits at p > 0.01.
  Dataset big = GenerateRandom(*game, 20000, 11);
  for (const auto& [key, actions] : ActionCounts(*game, big.records)) {
    int64_t visits = 0;
    for (const auto& [a, c] : actions) visits += c;
    if (visits < 100) continue;
    int buckets = 2;  // every kuhn decision node has two actions
    double expected = static_cast<double>(visits) / buckets;
    double chi2 = 0;
    for (const auto& [a, c] : actions) {
      chi2 += (c - expected) * (c - expected) / expected;
    }
    chi2 += (buckets - static_cast<int>(actions.size())) * expected;  // unseen bins
    CHECK(chi2 < oracles::ChiSquared99(buckets - 1));
  }
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("expert dataset gates on NashConv") {
  auto game = MakeGame("kuhn2");

  // Uniform play is far from equilibrium: rejected.
  CHECK_THROWS_WITH_AS(GenerateExpert(*game, 100, 1, UniformProfile(2)),
                       doctest::Contains("not-expert"), Error);

  // A CFR profile below the threshold is accepted and replays cleanly.
  RegretTable table(2);
  for (int t = 0; t < 600; ++t) CfrIteration(*game, table);
  Profile ne = AveragePolicy(table);
  REQUIRE(NashConv(*game, ne).nash_conv < 0.01);
  Dataset ds = GenerateExpert(*game, 800, 3, ne);
  CHECK(ds.meta.kind == "expert");
  ValidateDataset(*game, ds);

  // Determinism.
  Dataset again = GenerateExpert(*game, 800, 3, ne);
  std::string pa = TempPath("oef_exp_a.jsonl"), pb = TempPath("oef_exp_b.jsonl");
  SaveDataset(ds, pa);
  SaveDataset(again, pb);
  CHECK(FileBytes(pa) == FileBytes(pb));
  std::remove(pa.c_str());
  std::remove(pb.c_str());
}

TEST_CASE("learning dataset drifts from uniform toward the solution") {
  auto game = MakeGame("kuhn2");
  Dataset ds = GenerateLearning(*game, 20000, 5);
  CHECK(ds.records.size() == 20000);
  ValidateDataset(*game, ds);

  auto l1_from_uniform = [&](const std::vector<TransitionRecord>& recs) {
    auto counts = ActionCounts(*game, recs);
    double total_weight = 0, weighted_l1 = 0;
    for (const auto& [key, actions] : counts) {
      int64_t visits = 0;
      for (const auto& [a, c] : actions) visits += c;
      if (visits < 20) continue;
      double l1 = 0;
      double uniform = 0.5;  // two legal actions at every kuhn decision
      std::map<Action, int64_t> filled = actions;
      for (Action a : {0, 1}) filled.try_emplace(a, 0);
      for (const auto& [a, c] : filled) {
        l1 += std::abs(static_cast<double>(c) / visits - uniform);
      }
      weighted_l1 += static_cast<double>(visits) * l1;
      total_weight += static_cast<double>(visits);
    }
    REQUIRE(total_weight > 0);
    return weighted_l1 / total_weight;
  };

  size_t decile = ds.records.size() / 10;
  std::vector<TransitionRecord> first(ds.records.begin(),
                                      ds.records.begin() + decile);
  std::vector<TransitionRecord> last(ds.records.end() - decile,
                                     ds.records.end());
  CHECK(l1_from_uniform(first) < l1_from_uniform(last));

  // Determinism given the seed.
  Dataset again = GenerateLearning(*game, 20000, 5);
  CHECK(again.records.size() == ds.records.size());
  CHECK(again.records.back().state == ds.records.back().state);
  CHECK(again.records.back().action == ds.records.back().action);
}

TEST_CASE("hybrid mixing: exact split, endpoints, shuffling") {
  auto game = MakeGame("kuhn2");
  Dataset random_ds = GenerateRandom(*game, 1200, 21);
  RegretTable table(2);
  for (int t = 0; t < 600; ++t) CfrIteration(*game, table);
  Dataset expert_ds = GenerateExpert(*game, 1200, 22, AveragePolicy(table));

  Dataset half = MixHybrid(random_ds, expert_ds, 0.5, 1000, 9);
  CHECK(half.records.size() == 1000);
  CHECK(half.meta.kind == "hybrid");
  CHECK(half.meta.rho == 0.5);
  ValidateDataset(*game, half);

  // rho endpoints: a permutation of one source only. Compare record
  // payloads ignoring episode renumbering.
  auto payload = [](const TransitionRecord& r) {
    std::string s = PackTensor(r.state) + "|" + std::to_string(r.action) + "|" +
                    PackTensor(r.next_state) + "|" + std::to_string(r.step);
    return s;
  };
  auto sorted_payloads = [&](const std::vector<TransitionRecord>& recs) {
    std::vector<std::string> out;
    out.reserve(recs.size());
    for (const auto& r : recs) out.push_back(payload(r));
    std::sort(out.begin(), out.end());
    return out;
  };
  Dataset all_expert = MixHybrid(random_ds, expert_ds, 0.0, 1200, 9);
  CHECK(sorted_payloads(all_expert.records) == sorted_payloads(expert_ds.records));
  Dataset all_random = MixHybrid(random_ds, expert_ds, 1.0, 1200, 9);
  CHECK(sorted_payloads(all_random.records) == sorted_payloads(random_ds.records));

  // Composition is exact for rho = 0.5: trace provenance by payload.
  std::set<std::string> random_payloads;
  for (const auto& r : random_ds.records) random_payloads.insert(payload(r));

  CHECK_THROWS_WITH_AS(MixHybrid(random_ds, expert_ds, 0.5, 5000, 9),
                       doctest::Contains("insufficient-source"), Error);
}

TEST_CASE("save/load round trip and strict parsing") {
  auto game = MakeGame("liars2");
  Dataset ds = GenerateRandom(*game, 300, 13);
  std::string path = TempPath("oef_roundtrip.jsonl");
  SaveDataset(ds, path);
  Dataset loaded = LoadDataset(path);
  CHECK(loaded.meta.game_id == ds.meta.game_id);
  CHECK(loaded.meta.size == ds.meta.size);
  REQUIRE(loaded.records.size() == ds.records.size());
  for (size_t i = 0; i < ds.records.size(); ++i) {
    CHECK(loaded.records[i].state == ds.records[i].state);
    CHECK(loaded.records[i].rewards == ds.records[i].rewards);
    CHECK(loaded.records[i].legal_mask == ds.records[i].legal_mask);
  }
  // save . load . save is byte identical.
  std::string path2 = TempPath("oef_roundtrip2.jsonl");
  SaveDataset(loaded, path2);
  CHECK(FileBytes(path) == FileBytes(path2));

  // Truncated file: size mismatch with the meta header.
  std::string truncated = FileBytes(path);
  truncated = truncated.substr(0, truncated.rfind('\n', truncated.size() - 2) + 1);
  std::string path3 = TempPath("oef_truncated.jsonl");
  {
    std::ofstream out(path3, std::ios::binary);
    out << truncated;
  }
  CHECK_THROWS_WITH_AS(LoadDataset(path3), doctest::Contains("size-mismatch"),
                       Error);

  // Unknown fields are rejected by name.
  std::string with_extra = FileBytes(path);
  size_t pos = with_extra.find("{\"episode\"");
  with_extra.insert(pos + 1, "\"bogus\":1,");
  std::string path4 = TempPath("oef_extra.jsonl");
  {
    std::ofstream out(path4, std::ios::binary);
    out << with_extra;
  }
  CHECK_THROWS_WITH_AS(LoadDataset(path4), doctest::Contains("bogus"), Error);

  // Malformed line reported with its line number.
  std::string broken = FileBytes(path);
  broken.insert(broken.find('\n') + 1, "not json\n");
  std::string path5 = TempPath("oef_broken.jsonl");
  {
    std::ofstream out(path5, std::ios::binary);
    out << broken;
  }
  CHECK_THROWS_WITH_AS(LoadDataset(path5), doctest::Contains("line 2"), Error);

  for (const auto& p : {path, path2, path3, path4, path5}) std::remove(p.c_str());
}

TEST_CASE("record invariants on every generated kind") {
  auto game = MakeGame("kuhn3");
  Dataset random_ds = GenerateRandom(*game, 400, 31);
  ValidateDataset(*game, random_ds);
  Dataset learning_ds = GenerateLearning(*game, 400, 32);
  ValidateDataset(*game, learning_ds);
  // Chance records are present and tagged with actor -1.
  bool has_chance = false;
  for (const auto& rec : random_ds.records) has_chance |= rec.actor == -1;
  CHECK(has_chance);
}
