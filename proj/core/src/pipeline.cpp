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

#include "oef/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace oef {

namespace {

std::vector<NetPreset> MakePresets(
    const std::vector<std::tuple<std::string, int64_t, int, int, int>>& rows) {
  std::vector<NetPreset> out;
  for (const auto& [game, size, hidden, batch, epochs] : rows) {
    out.push_back({game, size, hidden, batch, epochs});
  }
  return out;
}

}  // namespace

const std::vector<NetPreset>& BcPresets() {
  static const std::vector<NetPreset> presets = MakePresets({
      {"kuhn2", 500, 32, 32, 1000},    {"kuhn2", 1000, 32, 32, 2000},
      {"kuhn2", 5000, 32, 32, 2000},   {"kuhn3", 1000, 32, 32, 5000},
      {"kuhn3", 5000, 32, 32, 5000},   {"kuhn3", 10000, 64, 128, 5000},
      {"kuhn4", 5000, 64, 64, 5000},   {"kuhn4", 10000, 64, 128, 5000},
      {"kuhn4", 20000, 64, 128, 5000}, {"kuhn5", 5000, 64, 64, 5000},
      {"kuhn5", 10000, 64, 128, 5000}, {"kuhn5", 20000, 64, 128, 5000},
      {"leduc2", 10000, 128, 128, 10000}, {"leduc2", 20000, 128, 128, 10000},
      {"leduc2", 50000, 128, 128, 10000}, {"leduc3", 10000, 128, 128, 10000},
      {"leduc3", 20000, 128, 128, 10000}, {"leduc3", 50000, 128, 128, 10000},
      {"liars6", 10000, 64, 64, 5000}, {"liars6", 20000, 64, 128, 5000},
      {"liars6", 50000, 64, 128, 5000}, {"pttt", 5000, 128, 128, 5000},
      {"pttt", 10000, 128, 128, 5000}, {"pttt", 20000, 128, 128, 5000},
  });
  return presets;
}

const std::vector<NetPreset>& EnvPresets() {
  static const std::vector<NetPreset> presets = MakePresets({
      {"kuhn2", 500, 32, 32, 1000},    {"kuhn2", 1000, 32, 32, 2000},
      {"kuhn2", 5000, 32, 32, 2000},   {"kuhn3", 1000, 32, 32, 2000},
      {"kuhn3", 5000, 32, 32, 5000},   {"kuhn3", 10000, 64, 128, 5000},
      {"kuhn4", 5000, 64, 64, 5000},   {"kuhn4", 10000, 64, 128, 5000},
      {"kuhn4", 20000, 64, 128, 5000}, {"kuhn5", 5000, 64, 64, 5000},
      {"kuhn5", 10000, 64, 128, 5000}, {"kuhn5", 20000, 64, 128, 5000},
      {"leduc2", 5000, 64, 64, 5000},  {"leduc2", 10000, 64, 64, 5000},
      {"leduc2", 20000, 128, 128, 10000}, {"leduc3", 10000, 128, 128, 10000},
      {"leduc3", 20000, 128, 128, 10000}, {"leduc3", 50000, 128, 128, 10000},
      {"liars6", 10000, 64, 64, 5000}, {"liars6", 20000, 64, 128, 5000},
      {"liars6", 50000, 64, 128, 5000}, {"pttt", 5000, 128, 128, 5000},
      {"pttt", 10000, 128, 128, 5000}, {"pttt", 20000, 128, 128, 5000},
  });
  return presets;
}

std::optional<NetPreset> FindPreset(const std::vector<NetPreset>& presets,
                                    const std::string& game_id, int64_t size) {
  for (const NetPreset& preset : presets) {
    if (preset.game_id == game_id && preset.data_size == size) return preset;
  }
  return std::nullopt;
}

NetPreset NearestPreset(const std::vector<NetPreset>& presets,
                        const std::string& game_id, int64_t size) {
  const NetPreset* best = nullptr;
  for (const NetPreset& preset : presets) {
    if (preset.game_id != game_id) continue;
    if (best == nullptr || std::abs(preset.data_size - size) <
                               std::abs(best->data_size - size)) {
      best = &preset;
    }
  }
  Check(best != nullptr, "preset: no rows for game " + game_id);
  return *best;
}

std::vector<double> DefaultAlphaGrid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

Profile CombineProfiles(const Profile& bc, const Profile& mb, double alpha,
                        const Catalog& catalog) {
  Check(alpha >= 0.0 && alpha <= 1.0, "combine: alpha must be in [0,1]");
  const int num_players = static_cast<int>(catalog.per_player.size());
  Profile out = UniformProfile(num_players);
  for (Player p = 0; p < num_players; ++p) {
    for (const auto& [key, info] : catalog.per_player[p]) {
      std::vector<double> from_bc =
          p < static_cast<int>(bc.size())
              ? bc[p].ProbsOrUniform(key, info.legal.size())
              : std::vector<double>(info.legal.size(), 1.0 / info.legal.size());
      std::vector<double> from_mb =
          p < static_cast<int>(mb.size())
              ? mb[p].ProbsOrUniform(key, info.legal.size())
              : std::vector<double>(info.legal.size(), 1.0 / info.legal.size());
      std::vector<double> mixed(info.legal.size());
      for (size_t i = 0; i < mixed.size(); ++i) {
        mixed[i] = alpha * from_bc[i] + (1.0 - alpha) * from_mb[i];
      }
      out[p].table[key] = std::move(mixed);
    }
    ValidatePolicy(out[p]);
  }
  return out;
}

AlphaSelection SelectBestAlpha(const Game& game, const Profile& bc,
                               const Profile& mb, const Catalog& catalog,
                               const std::vector<double>& grid) {
  AlphaSelection selection;
  bool first = true;
  for (double alpha : grid) {
    Check(alpha >= 0.0 && alpha <= 1.0, "combine: grid alpha out of range");
    Profile combined = CombineProfiles(bc, mb, alpha, catalog);
    double conv = NashConv(game, combined).nash_conv;
    selection.table.emplace_back(alpha, conv);
    // Ties (up to rounding noise in the convex combination) keep the
    // smaller alpha.
    if (first || conv < selection.best_nash_conv - 1e-12) {
      selection.best_alpha = alpha;
      selection.best_nash_conv = conv;
      first = false;
    }
  }
  return selection;
}

ApproxNashConvResult ApproxNashConv(const Game& game, const StrategyFn& profile,
                                    const ApproxEvalConfig& cfg, uint64_t seed) {
  ApproxNashConvResult result;
  // Monte Carlo estimate of each player's value under the profile.
  result.profile_values.assign(game.NumPlayers(), 0.0);
  Rng rng(DeriveSeed(seed, 0xAE00));
  for (int64_t e = 0; e < cfg.value_episodes; ++e) {
    History h = game.Root();
    NodeView view = h.View();
    while (!view.IsTerminal()) {
      Action a;
      if (view.IsChance()) {
        a = view.legal[rng.SampleIndex(view.chance_probs)];
      } else {
        a = view.legal[rng.SampleIndex(
            profile(game.Infoset(h.actions(), view.to_move), view.legal))];
      }
      h = h.Child(a);
      view = h.View();
    }
    for (int p = 0; p < game.NumPlayers(); ++p) {
      result.profile_values[p] += view.payoffs[p];
    }
  }
  for (double& v : result.profile_values) {
    v /= static_cast<double>(cfg.value_episodes);
  }

  TrueTree tree(game);
  for (Player p = 0; p < game.NumPlayers(); ++p) {
    double best = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < cfg.br_seeds; ++s) {
      BestResponseResult br = QLearnBestResponse(
          tree, profile, p, cfg.qlearn, DeriveSeed(seed, 0xAE10 + p * 8 + s));
      best = std::max(best, br.value);
    }
    result.br_values.push_back(best);
    result.nash_conv += best - result.profile_values[p];
  }
  return result;
}

Profile ComputeExpertProfile(const Game& game, int64_t iterations) {
  RegretTable table(game.NumPlayers());
  for (int64_t t = 0; t < iterations; ++t) CfrIteration(game, table);
  return AveragePolicy(table);
}

std::string FormatDouble(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  Check(ec == std::errc(), "csv: number formatting failed");
  return std::string(buffer, end);
}

std::string ResultCsvHeader() {
  return "game,kind,rho,size,solver,method,seed,alpha,nashconv,approximate";
}

std::string ResultCsvRow(const ExperimentResult& r, const std::string& method) {
  double alpha = method == "bc" ? 1.0 : method == "mb" ? 0.0 : r.best_alpha;
  double conv = method == "bc"
                    ? r.bc_nash_conv
                    : method == "mb" ? r.mb_nash_conv : r.combined_nash_conv;
  std::ostringstream row;
  row << r.game_id << ',' << r.kind << ',' << FormatDouble(r.rho) << ','
      << r.size << ',' << r.solver << ',' << method << ',' << r.seed << ','
      << FormatDouble(alpha) << ',' << FormatDouble(conv) << ','
      << (r.approximate ? 1 : 0);
  return row.str();
}

void WriteResultsCsv(const std::string& path,
                     const std::vector<ExperimentResult>& results) {
  std::ofstream out(path, std::ios::binary);
  Check(out.good(), "csv: cannot write " + path);
  out << ResultCsvHeader() << "\n";
  for (const ExperimentResult& r : results) {
    out << ResultCsvRow(r, "bc") << "\n";
    out << ResultCsvRow(r, "mb") << "\n";
    out << ResultCsvRow(r, "bc+mb") << "\n";
  }
}

std::vector<CsvRow> LoadResultsCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Check(in.good(), "csv: cannot read " + path);
  std::string line;
  Check(static_cast<bool>(std::getline(in, line)), "csv: empty file");
  Check(line == ResultCsvHeader(), "csv: unexpected header");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    CsvRow row;
    auto next = [&] {
      Check(static_cast<bool>(std::getline(ss, field, ',')), "csv: short row");
      return field;
    };
    row.game = next();
    row.kind = next();
    row.rho = std::stod(next());
    row.size = std::stoll(next());
    row.solver = next();
    row.method = next();
    row.seed = std::stoull(next());
    row.alpha = std::stod(next());
    row.nash_conv = std::stod(next());
    row.approximate = next() == "1";
    rows.push_back(std::move(row));
  }
  return rows;
}

void EmitPlotData(const std::vector<CsvRow>& rows, const std::string& out_dir,
                  const std::string& x_axis, const std::string& y_axis,
                  const std::vector<std::string>& methods) {
  Check(x_axis == "rho" || x_axis == "size", "plot: x axis must be rho|size");
  Check(y_axis == "nashconv" || y_axis == "alpha",
        "plot: y axis must be nashconv|alpha");
  std::vector<CsvRow> kept;
  for (const CsvRow& row : rows) {
    if (!methods.empty() &&
        std::find(methods.begin(), methods.end(), row.method) == methods.end()) {
      continue;
    }
    kept.push_back(row);
  }
  if (kept.empty()) Fatal("empty-method: no rows left after the method filter");

  // panel key -> (x, method) -> samples
  std::map<std::string, std::map<std::pair<double, std::string>,
                                 std::vector<double>>> panels;
  for (const CsvRow& row : kept) {
    std::string panel = y_axis + "_by_" + x_axis + "__" + row.game + "_" +
                        row.solver + "_" +
                        (x_axis == "rho" ? "size" + std::to_string(row.size)
                                         : "rho" + FormatDouble(row.rho));
    double x = x_axis == "rho" ? row.rho : static_cast<double>(row.size);
    double y = y_axis == "nashconv" ? row.nash_conv : row.alpha;
    panels[panel][{x, row.method}].push_back(y);
  }

  std::filesystem::create_directories(out_dir);
  for (const auto& [panel, cells] : panels) {
    std::ofstream out(out_dir + "/" + panel + ".csv", std::ios::binary);
    Check(out.good(), "plot: cannot write panel " + panel);
    out << "x,method,mean,stddev,n\n";
    for (const auto& [key, samples] : cells) {
      double mean = 0;
      for (double v : samples) mean += v;
      mean /= static_cast<double>(samples.size());
      double var = 0;
      for (double v : samples) var += (v - mean) * (v - mean);
      var /= static_cast<double>(samples.size());
      out << FormatDouble(key.first) << ',' << key.second << ','
          << FormatDouble(mean) << ',' << FormatDouble(std::sqrt(var)) << ','
          << samples.size() << "\n";
    }
  }
}

namespace {

uint64_t FileChecksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return Fnv1a64(ss.str());
}

// Stage wrapper: prefixes failures with the stage name.
template <typename Fn>
auto Stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    Fatal("stage " + name + " failed: " + e.what());
  }
}

StrategyFn CombinedStrategy(const StrategyFn& bc, const StrategyFn& mb,
                            double alpha) {
  return [bc, mb, alpha](const InfoSetKey& key,
                         const std::vector<Action>& legal) {
    std::vector<double> a = bc(key, legal);
    std::vector<double> b = mb(key, legal);
    for (size_t i = 0; i < a.size(); ++i) {
      a[i] = alpha * a[i] + (1.0 - alpha) * b[i];
    }
    return a;
  };
}

StrategyFn BcStrategy(const BcModel& model, const Game& game) {
  return [&model, &game](const InfoSetKey& key,
                         const std::vector<Action>& legal) {
    std::vector<uint8_t> mask = MaskFromLegal(legal, game.MaxActions());
    std::vector<double> full = BcProbs(model, key.player, key.tensor, mask);
    std::vector<double> probs;
    probs.reserve(legal.size());
    for (Action a : legal) probs.push_back(full[a]);
    return probs;
  };
}

StrategyFn StrategyNetFn(const std::vector<Net>& nets, const Game& game) {
  return [&nets, &game](const InfoSetKey& key,
                        const std::vector<Action>& legal) {
    std::vector<double> full = nets[key.player].Forward(key.tensor);
    std::vector<double> probs;
    double total = 0;
    for (Action a : legal) total += full[a];
    for (Action a : legal) {
      probs.push_back(total > 0 ? full[a] / total : 1.0 / legal.size());
    }
    return probs;
  };
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentConfig& cfg,
                               std::map<std::string, Profile>* expert_cache,
                               ExperimentArtifacts* artifacts) {
  auto started = std::chrono::steady_clock::now();
  auto game = MakeGame(cfg.game_id);
  const bool exact_eval = cfg.game_id != "pttt";

  ExperimentResult result;
  result.game_id = cfg.game_id;
  result.kind = cfg.kind;
  result.solver = cfg.solver;
  result.rho = cfg.kind == "hybrid" ? cfg.rho : (cfg.kind == "random" ? 1.0 : 0.0);
  result.size = cfg.size;
  result.seed = cfg.seed;
  result.approximate = !exact_eval;

  const bool want_files = !cfg.out_dir.empty();
  if (want_files) std::filesystem::create_directories(cfg.out_dir);
  auto emit = [&](const std::string& name, auto&& writer) {
    if (!want_files) return;
    std::string path = cfg.out_dir + "/" + name;
    writer(path);
    result.checksums[name] = FileChecksum(path);
  };

  // generate / mix ----------------------------------------------------------
  Dataset dataset = Stage("generate", [&] {
    if (cfg.kind == "random") {
      return GenerateRandom(*game, cfg.size, DeriveSeed(cfg.seed, 1), cfg.workers);
    }
    if (cfg.kind == "learning") {
      return GenerateLearning(*game, cfg.size, DeriveSeed(cfg.seed, 1));
    }
    Check(exact_eval, "expert data needs an exact solver for this game");
    Profile expert;
    if (expert_cache != nullptr && expert_cache->count(cfg.game_id)) {
      expert = expert_cache->at(cfg.game_id);
    } else {
      expert = ComputeExpertProfile(*game, cfg.expert_cfr_iters);
      if (expert_cache != nullptr) (*expert_cache)[cfg.game_id] = expert;
    }
    if (cfg.kind == "expert") {
      return GenerateExpert(*game, cfg.size, DeriveSeed(cfg.seed, 2), expert,
                            cfg.expert_threshold, cfg.workers);
    }
    Check(cfg.kind == "hybrid", "unknown dataset kind " + cfg.kind);
    Dataset random_ds =
        GenerateRandom(*game, cfg.size, DeriveSeed(cfg.seed, 1), cfg.workers);
    Dataset expert_ds = GenerateExpert(*game, cfg.size, DeriveSeed(cfg.seed, 2),
                                       expert, cfg.expert_threshold, cfg.workers);
    return MixHybrid(random_ds, expert_ds, cfg.rho, cfg.size,
                     DeriveSeed(cfg.seed, 3));
  });
  Stage("generate", [&] { ValidateDataset(*game, dataset); return 0; });
  emit("dataset.jsonl", [&](const std::string& p) { SaveDataset(dataset, p); });

  Catalog catalog;
  if (exact_eval) catalog = BuildCatalog(*game);

  // train-bc ----------------------------------------------------------------
  NetPreset bc_preset = cfg.bc_preset.value_or(
      NearestPreset(BcPresets(), cfg.game_id, cfg.size));
  BcModel bc_model = Stage("train-bc", [&] {
    return TrainBc(*game, dataset, bc_preset.ToTrainConfig(DeriveSeed(cfg.seed, 4)));
  });
  emit("bc_model.json", [&](const std::string& p) { SaveBcModel(bc_model, p); });

  // train-env ---------------------------------------------------------------
  NetPreset env_preset = cfg.env_preset.value_or(
      NearestPreset(EnvPresets(), cfg.game_id, cfg.size));
  EnvModel env_model = Stage("train-env", [&] {
    return TrainEnv(*game, dataset,
                    env_preset.ToTrainConfig(DeriveSeed(cfg.seed, 5)));
  });
  emit("env_model.json", [&](const std::string& p) {
    SaveEnvModel(env_model, p);
    result.checksums["env_model.json.sidecar.json"] =
        FileChecksum(p + ".sidecar.json");
  });
  auto model_game = MakeLearnedModelGame(game, env_model);

  // solve (psro | cfr) ------------------------------------------------------
  Profile mb_profile;
  std::vector<Net> mb_nets;
  Stage("solve-" + cfg.solver, [&] {
    if (cfg.solver == "psro") {
      PsroConfig psro = cfg.psro;
      psro.seed = DeriveSeed(cfg.seed, 6);
      if (!exact_eval) psro.oracle = BrOracleKind::kQLearning;
      PsroResult solved =
          OefPsro(*model_game, psro, exact_eval ? &catalog : nullptr, game.get());
      mb_profile = std::move(solved.policy);
      result.fault_rate = solved.fault_rate;
      return 0;
    }
    Check(cfg.solver == "cfr", "unknown solver " + cfg.solver);
    DeepCfrConfig dc = cfg.cfr;
    dc.seed = DeriveSeed(cfg.seed, 6);
    DeepCfrResult solved = OefCfr(*model_game, dc, catalog);
    mb_profile = std::move(solved.policy);
    mb_nets = std::move(solved.strategy_nets);
    result.fault_rate = solved.fault_rate;
    return 0;
  });

  // combine + evaluate ------------------------------------------------------
  Profile bc_profile, combined_profile;
  if (exact_eval) {
    bc_profile = Stage("evaluate", [&] { return BcPolicy(bc_model, *game, catalog); });
    result.bc_nash_conv = NashConv(*game, bc_profile).nash_conv;
    result.mb_nash_conv = NashConv(*game, mb_profile).nash_conv;
    AlphaSelection selection = Stage("combine", [&] {
      return SelectBestAlpha(*game, bc_profile, mb_profile, catalog,
                             cfg.alpha_grid);
    });
    result.best_alpha = selection.best_alpha;
    result.combined_nash_conv = selection.best_nash_conv;
    result.alpha_table = selection.table;
    combined_profile =
        CombineProfiles(bc_profile, mb_profile, selection.best_alpha, catalog);
    emit("bc_policy.json",
         [&](const std::string& p) { SaveProfile(p, bc_profile, cfg.game_id); });
    emit("mb_policy.json",
         [&](const std::string& p) { SaveProfile(p, mb_profile, cfg.game_id); });
    emit("combined_policy.json", [&](const std::string& p) {
      SaveProfile(p, combined_profile, cfg.game_id);
    });
  } else {
    // Sampled evaluation for games without exact best response: the
    // reported numbers are approximations and flagged as such.
    ApproxEvalConfig eval;
    StrategyFn bc_fn = BcStrategy(bc_model, *game);
    StrategyFn mb_fn = cfg.solver == "cfr" && !mb_nets.empty()
                           ? StrategyNetFn(mb_nets, *game)
                           : ProfileStrategy(mb_profile);
    result.bc_nash_conv =
        ApproxNashConv(*game, bc_fn, eval, DeriveSeed(cfg.seed, 7)).nash_conv;
    result.mb_nash_conv =
        ApproxNashConv(*game, mb_fn, eval, DeriveSeed(cfg.seed, 8)).nash_conv;
    bool first = true;
    for (double alpha : cfg.alpha_grid) {
      double conv = ApproxNashConv(*game, CombinedStrategy(bc_fn, mb_fn, alpha),
                                   eval, DeriveSeed(cfg.seed, 9))
                        .nash_conv;
      result.alpha_table.emplace_back(alpha, conv);
      if (first || conv < result.combined_nash_conv) {
        result.best_alpha = alpha;
        result.combined_nash_conv = conv;
        first = false;
      }
    }
    emit("mb_policy.json",
         [&](const std::string& p) { SaveProfile(p, mb_profile, cfg.game_id); });
  }

  if (artifacts != nullptr) {
    artifacts->bc = bc_profile;
    artifacts->mb = mb_profile;
    artifacts->combined = combined_profile;
  }

  // manifest (deterministic) + timing (not byte-compared) --------------------
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  if (want_files) {
    nlohmann::ordered_json manifest;
    manifest["game"] = cfg.game_id;
    manifest["kind"] = cfg.kind;
    manifest["rho"] = result.rho;
    manifest["size"] = cfg.size;
    manifest["seed"] = cfg.seed;
    manifest["solver"] = cfg.solver;
    manifest["bc_preset"] = bc_preset.Name();
    manifest["env_preset"] = env_preset.Name();
    manifest["expert_cfr_iters"] = cfg.expert_cfr_iters;
    manifest["expert_threshold"] = cfg.expert_threshold;
    manifest["alpha_grid"] = cfg.alpha_grid;
    manifest["approximate"] = result.approximate;
    manifest["decode_fault_rate"] = result.fault_rate;
    manifest["bc_nashconv"] = result.bc_nash_conv;
    manifest["mb_nashconv"] = result.mb_nash_conv;
    manifest["combined_nashconv"] = result.combined_nash_conv;
    manifest["best_alpha"] = result.best_alpha;
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    for (const auto& [alpha, conv] : result.alpha_table) {
      table.push_back({{"alpha", alpha}, {"nashconv", conv}});
    }
    manifest["alpha_table"] = std::move(table);
    nlohmann::ordered_json sums = nlohmann::ordered_json::object();
    for (const auto& [name, sum] : result.checksums) sums[name] = sum;
    manifest["checksums"] = std::move(sums);
    std::ofstream out(cfg.out_dir + "/manifest.json", std::ios::binary);
    out << manifest.dump(2) << "\n";

    nlohmann::ordered_json timing;
    timing["wall_seconds"] = result.wall_seconds;
    std::ofstream tout(cfg.out_dir + "/timing.json", std::ios::binary);
    tout << timing.dump(2) << "\n";
  }
  return result;
}

}  // namespace oef
