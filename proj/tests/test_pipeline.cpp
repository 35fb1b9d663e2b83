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

#include <filesystem>
#include <fstream>

#include "oef/games.hpp"
#include "oef/pipeline.hpp"

using namespace oef;

namespace {

std::string TempDir(const std::string& name) {
  std::string path = (std::filesystem::temp_directory_path() / name).string();
  std::filesystem::remove_all(path);
  std::filesystem::create_directories(path);
  return path;
}

Profile RandomProfile(const Game& game, const Catalog& catalog, uint64_t seed) {
  Rng rng(seed);
  Profile profile = UniformProfile(game.NumPlayers());
  for (Player p = 0; p < game.NumPlayers(); ++p) {
    for (const auto& [key, info] : catalog.per_player[p]) {
      std::vector<double> probs(info.legal.size());
      double total = 0;
      for (double& x : probs) total += (x = rng.Uniform() + 0.01);
      for (double& x : probs) x /= total;
      profile[p].table[key] = probs;
    }
  }
  return profile;
}

}  // namespace

TEST_CASE("combine endpoints and arithmetic") {
  auto game = MakeGame("kuhn2");
  Catalog catalog = BuildCatalog(*game);
  Profile bc = RandomProfile(*game, catalog, 1);
  Profile mb = RandomProfile(*game, catalog, 2);

  Profile at_one = CombineProfiles(bc, mb, 1.0, catalog);
  Profile at_zero = CombineProfiles(bc, mb, 0.0, catalog);
  for (Player p = 0; p < 2; ++p) {
    for (const auto& [key, probs] : at_one[p].table) {
      CHECK(probs == bc[p].table.at(key));
    }
    for (const auto& [key, probs] : at_zero[p].table) {
      CHECK(probs == mb[p].table.at(key));
    }
  }

  // alpha=0.5 on point masses [1,0] and [0,1].
  Profile a = bc, b = mb;
  std::string key = bc[0].table.begin()->first;
  a[0].table[key] = {1.0, 0.0};
  b[0].table[key] = {0.0, 1.0};
  Profile mixed = CombineProfiles(a, b, 0.5, catalog);
  CHECK(mixed[0].table.at(key) == std::vector<double>{0.5, 0.5});
}

TEST_CASE("preset tables carry the published rows") {
  // Behavior cloning, 2-player Kuhn at 500 records.
  auto bc = FindPreset(BcPresets(), "kuhn2", 500);
  REQUIRE(bc.has_value());
  CHECK(bc->hidden == 32);
  CHECK(bc->batch == 32);
  CHECK(bc->epochs == 1000);
  CHECK(bc->Name() == "kuhn2_500");

  // Environment model, 2-player Leduc at 5000 records (differs from the
  // behavior-cloning table).
  auto env = FindPreset(EnvPresets(), "leduc2", 5000);
  REQUIRE(env.has_value());
  CHECK(env->hidden == 64);
  CHECK(env->batch == 64);
  CHECK(env->epochs == 5000);
  CHECK_FALSE(FindPreset(BcPresets(), "leduc2", 5000).has_value());

  // Nearest-size fallback.
  NetPreset near = NearestPreset(BcPresets(), "leduc2", 5000);
  CHECK(near.data_size == 10000);
  CHECK_THROWS_WITH_AS(NearestPreset(BcPresets(), "nope", 1),
                       doctest::Contains("no rows"), Error);
}

TEST_CASE("select_best_alpha: grid, ties, endpoint containment") {
  auto game = MakeGame("kuhn2");
  Catalog catalog = BuildCatalog(*game);

  // Identical inputs: constant NashConv across the grid, tie -> alpha 0.
  Profile same = RandomProfile(*game, catalog, 3);
  AlphaSelection tie = SelectBestAlpha(*game, same, same, catalog);
  CHECK(tie.best_alpha == 0.0);
  CHECK(tie.table.size() == 11);
  for (const auto& [alpha, conv] : tie.table) {
    CHECK(conv == doctest::Approx(tie.table[0].second).epsilon(1e-12));
  }

  // Endpoint containment: best of the grid never loses to either input.
  for (uint64_t seed : {7ULL, 8ULL, 9ULL}) {
    Profile bc = RandomProfile(*game, catalog, seed);
    Profile mb = RandomProfile(*game, catalog, seed + 100);
    AlphaSelection sel = SelectBestAlpha(*game, bc, mb, catalog);
    double bc_conv = NashConv(*game, bc).nash_conv;
    double mb_conv = NashConv(*game, mb).nash_conv;
    CHECK(sel.best_nash_conv <= std::min(bc_conv, mb_conv) + 1e-9);
    CHECK(sel.table.front().second == doctest::Approx(mb_conv).epsilon(1e-9));
    CHECK(sel.table.back().second == doctest::Approx(bc_conv).epsilon(1e-9));
  }
}

TEST_CASE("experiment end to end: artifacts and byte determinism") {
  ExperimentConfig cfg;
  cfg.game_id = "kuhn2";
  cfg.kind = "hybrid";
  cfg.rho = 0.5;
  cfg.size = 800;
  cfg.seed = 77;
  cfg.solver = "psro";
  cfg.psro.iterations = 6;
  cfg.bc_preset = NetPreset{"kuhn2", 800, 32, 32, 150};
  cfg.env_preset = NetPreset{"kuhn2", 800, 32, 32, 1000};
  cfg.expert_cfr_iters = 500;

  cfg.out_dir = TempDir("oef_exp_a");
  ExperimentResult first = RunExperiment(cfg);
  cfg.out_dir = TempDir("oef_exp_b");
  ExperimentResult second = RunExperiment(cfg);

  CHECK(first.bc_nash_conv == second.bc_nash_conv);
  CHECK(first.mb_nash_conv == second.mb_nash_conv);
  CHECK(first.combined_nash_conv == second.combined_nash_conv);
  CHECK(first.best_alpha == second.best_alpha);
  REQUIRE(first.checksums.size() == second.checksums.size());
  for (const auto& [name, sum] : first.checksums) {
    CAPTURE(name);
    CHECK(second.checksums.at(name) == sum);
  }

  // Endpoint dominance on the real run.
  CHECK(first.combined_nash_conv <=
        std::min(first.bc_nash_conv, first.mb_nash_conv) + 1e-9);

  // Expected artifacts all written.
  for (const std::string& name :
       {"dataset.jsonl", "bc_model.json", "env_model.json", "bc_policy.json",
        "mb_policy.json", "combined_policy.json"}) {
    CAPTURE(name);
    CHECK(std::filesystem::exists(cfg.out_dir + "/" + name));
  }
  CHECK(std::filesystem::exists(cfg.out_dir + "/manifest.json"));

  // The CSV writer emits one row per method with the right alphas.
  std::string csv = TempDir("oef_csv") + "/results.csv";
  WriteResultsCsv(csv, {first});
  std::vector<CsvRow> rows = LoadResultsCsv(csv);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].method == "bc");
  CHECK(rows[0].alpha == 1.0);
  CHECK(rows[1].method == "mb");
  CHECK(rows[1].alpha == 0.0);
  CHECK(rows[2].method == "bc+mb");
  CHECK(rows[2].alpha == first.best_alpha);
  CHECK(rows[2].nash_conv == doctest::Approx(first.combined_nash_conv));
}

TEST_CASE("plot data aggregation") {
  std::vector<CsvRow> rows;
  for (uint64_t seed = 0; seed < 3; ++seed) {
    for (double rho : {0.0, 0.5, 1.0}) {
      CsvRow row;
      row.game = "kuhn2";
      row.kind = "hybrid";
      row.solver = "psro";
      row.method = "bc";
      row.rho = rho;
      row.size = 5000;
      row.seed = seed;
      row.alpha = 1.0;
      row.nash_conv = rho + static_cast<double>(seed);  // mean rho+1, sd sqrt(2/3)
      rows.push_back(row);
    }
  }
  std::string dir = TempDir("oef_plot");
  EmitPlotData(rows, dir, "rho", "nashconv");
  std::ifstream in(dir + "/nashconv_by_rho__kuhn2_psro_size5000.csv");
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,method,mean,stddev,n");
  std::string line;
  std::getline(in, line);
  // x=0: samples {0,1,2}: mean 1, population stddev sqrt(2/3).
  CHECK(line.rfind("0,bc,1,", 0) == 0);
  CHECK(line.find("0.816496") != std::string::npos);
  CHECK(line.back() == '3');

  CHECK_THROWS_WITH_AS(EmitPlotData(rows, dir, "rho", "nashconv", {"nope"}),
                       doctest::Contains("empty-method"), Error);
}

TEST_CASE("csv round trip preserves formatting") {
  ExperimentResult r;
  r.game_id = "kuhn3";
  r.kind = "hybrid";
  r.solver = "cfr";
  r.rho = 0.25;
  r.size = 1000;
  r.seed = 5;
  r.bc_nash_conv = 0.1234567890123;
  r.mb_nash_conv = 1e-9;
  r.combined_nash_conv = 1e-9;
  r.best_alpha = 0.3;
  std::string path = TempDir("oef_csv2") + "/r.csv";
  WriteResultsCsv(path, {r});
  std::vector<CsvRow> rows = LoadResultsCsv(path);
  CHECK(rows[0].nash_conv == 0.1234567890123);  // exact round trip
  CHECK(rows[1].nash_conv == 1e-9);
  CHECK(rows[2].rho == 0.25);
}
