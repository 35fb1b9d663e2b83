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
//
// Command-line driver: dataset generation, model training, offline
// solving, policy combination, evaluation, and experiment sweeps.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "oef/games.hpp"
#include "oef/pipeline.hpp"

namespace {

using namespace oef;

uint64_t MaybeEnvSeed(uint64_t seed) {
  const char* env = std::getenv("OEF_SEED");
  if (env == nullptr || *env == '\0') return seed;
  return std::strtoull(env, nullptr, 10);
}

Profile LoadProfileFor(const std::string& path, const std::string& game_id) {
  auto [profile, from_game] = LoadProfile(path);
  Check(from_game == game_id, "policy file is for game " + from_game);
  return profile;
}

// --- sweep config ----------------------------------------------------------

struct SweepConfig {
  std::string game;
  std::vector<std::string> kinds = {"hybrid"};
  std::vector<double> rhos = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<int64_t> sizes = {5000};
  std::vector<uint64_t> seeds = {1, 2, 3};
  std::string solver = "psro";
  std::string out_dir = "runs";
  int workers = 1;
  std::vector<double> alpha_grid = DefaultAlphaGrid();
  int64_t expert_iters = 2000;
  double expert_threshold = 0.01;
  std::optional<NetPreset> bc_override, env_override;
  PsroConfig psro;
  DeepCfrConfig cfr;
};

NetPreset ParsePresetOverride(const nlohmann::json& j, const std::string& game) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    Check(it.key() == "hidden" || it.key() == "batch" || it.key() == "epochs",
          "config: unknown net field '" + it.key() + "'");
  }
  NetPreset preset;
  preset.game_id = game;
  preset.hidden = j.at("hidden").get<int>();
  preset.batch = j.at("batch").get<int>();
  preset.epochs = j.at("epochs").get<int>();
  return preset;
}

SweepConfig LoadSweepConfig(const std::string& path) {
  std::ifstream in(path);
  Check(in.good(), "config: cannot read " + path);
  nlohmann::json j = nlohmann::json::parse(in);

  static const std::set<std::string> known = {
      "game",   "kinds",  "rhos",   "sizes",  "seeds",      "solver",
      "out_dir", "workers", "alpha_grid", "expert", "bc", "env", "psro", "cfr"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    Check(known.count(it.key()) > 0, "config: unknown field '" + it.key() + "'");
  }

  SweepConfig cfg;
  cfg.game = j.at("game").get<std::string>();
  MakeGame(cfg.game);  // validates the id
  if (j.contains("kinds")) cfg.kinds = j["kinds"].get<std::vector<std::string>>();
  if (j.contains("rhos")) cfg.rhos = j["rhos"].get<std::vector<double>>();
  if (j.contains("sizes")) cfg.sizes = j["sizes"].get<std::vector<int64_t>>();
  if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<uint64_t>>();
  if (j.contains("solver")) cfg.solver = j["solver"].get<std::string>();
  Check(cfg.solver == "psro" || cfg.solver == "cfr",
        "config: solver must be psro|cfr");
  if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
  if (j.contains("alpha_grid")) {
    cfg.alpha_grid = j["alpha_grid"].get<std::vector<double>>();
  }
  if (j.contains("expert")) {
    for (auto it = j["expert"].begin(); it != j["expert"].end(); ++it) {
      Check(it.key() == "iters" || it.key() == "threshold",
            "config: unknown expert field '" + it.key() + "'");
    }
    if (j["expert"].contains("iters")) {
      cfg.expert_iters = j["expert"]["iters"].get<int64_t>();
    }
    if (j["expert"].contains("threshold")) {
      cfg.expert_threshold = j["expert"]["threshold"].get<double>();
    }
  }
  if (j.contains("bc")) cfg.bc_override = ParsePresetOverride(j["bc"], cfg.game);
  if (j.contains("env")) cfg.env_override = ParsePresetOverride(j["env"], cfg.game);
  if (j.contains("psro")) {
    for (auto it = j["psro"].begin(); it != j["psro"].end(); ++it) {
      Check(it.key() == "iterations" || it.key() == "meta" || it.key() == "oracle",
            "config: unknown psro field '" + it.key() + "'");
    }
    if (j["psro"].contains("iterations")) {
      cfg.psro.iterations = j["psro"]["iterations"].get<int>();
    }
    if (j["psro"].contains("meta")) {
      cfg.psro.meta_solver =
          MetaSolverFromName(j["psro"]["meta"].get<std::string>());
    }
    if (j["psro"].contains("oracle")) {
      std::string oracle = j["psro"]["oracle"].get<std::string>();
      Check(oracle == "exact" || oracle == "qlearn",
            "config: oracle must be exact|qlearn");
      cfg.psro.oracle = oracle == "exact" ? BrOracleKind::kExactTree
                                          : BrOracleKind::kQLearning;
    }
  }
  if (j.contains("cfr")) {
    static const std::set<std::string> cfr_keys = {
        "iterations", "traversals", "hidden", "regret_steps", "strategy_steps",
        "batch", "lr", "reservoir"};
    for (auto it = j["cfr"].begin(); it != j["cfr"].end(); ++it) {
      Check(cfr_keys.count(it.key()) > 0,
            "config: unknown cfr field '" + it.key() + "'");
    }
    auto& c = j["cfr"];
    if (c.contains("iterations")) cfg.cfr.iterations = c["iterations"].get<int>();
    if (c.contains("traversals")) cfg.cfr.traversals = c["traversals"].get<int>();
    if (c.contains("hidden")) cfg.cfr.hidden = c["hidden"].get<int>();
    if (c.contains("regret_steps")) {
      cfg.cfr.regret_sgd_steps = c["regret_steps"].get<int>();
    }
    if (c.contains("strategy_steps")) {
      cfg.cfr.strategy_sgd_steps = c["strategy_steps"].get<int>();
    }
    if (c.contains("batch")) cfg.cfr.batch_size = c["batch"].get<int>();
    if (c.contains("lr")) cfg.cfr.learning_rate = c["lr"].get<double>();
    if (c.contains("reservoir")) {
      cfg.cfr.reservoir_capacity = c["reservoir"].get<size_t>();
    }
  }
  return cfg;
}

int RunSweep(SweepConfig sweep, uint64_t env_seed_override, bool has_override) {
  if (has_override) sweep.seeds = {env_seed_override};
  std::filesystem::create_directories(sweep.out_dir);

  // Cells share the expert profile; compute it once up front.
  std::map<std::string, Profile> expert_cache;
  bool needs_expert = false;
  for (const std::string& kind : sweep.kinds) {
    needs_expert |= kind == "expert" || kind == "hybrid";
  }
  if (needs_expert) {
    auto game = MakeGame(sweep.game);
    expert_cache[sweep.game] = ComputeExpertProfile(*game, sweep.expert_iters);
  }

  struct Cell {
    ExperimentConfig cfg;
    std::string name;
  };
  std::vector<Cell> cells;
  for (const std::string& kind : sweep.kinds) {
    bool first_rho = true;
    for (double rho : sweep.rhos) {
      if (kind != "hybrid" && !first_rho) continue;
      first_rho = false;
      for (int64_t size : sweep.sizes) {
        for (uint64_t seed : sweep.seeds) {
          ExperimentConfig cfg;
          cfg.game_id = sweep.game;
          cfg.kind = kind;
          cfg.rho = rho;
          cfg.size = size;
          cfg.seed = seed;
          cfg.solver = sweep.solver;
          cfg.alpha_grid = sweep.alpha_grid;
          cfg.expert_cfr_iters = sweep.expert_iters;
          cfg.expert_threshold = sweep.expert_threshold;
          cfg.psro = sweep.psro;
          cfg.cfr = sweep.cfr;
          if (sweep.bc_override.has_value()) {
            cfg.bc_preset = sweep.bc_override;
            cfg.bc_preset->data_size = size;
          }
          if (sweep.env_override.has_value()) {
            cfg.env_preset = sweep.env_override;
            cfg.env_preset->data_size = size;
          }
          std::string name =
              sweep.game + "_" + kind +
              (kind == "hybrid" ? "_rho" + FormatDouble(rho) : "") + "_n" +
              std::to_string(size) + "_s" + std::to_string(seed);
          cfg.out_dir = sweep.out_dir + "/" + name;
          cells.push_back({std::move(cfg), std::move(name)});
        }
      }
    }
  }

  // Independent cells run in parallel up to the worker cap; results land
  // in the deterministic cell order regardless of completion order.
  std::vector<ExperimentResult> results(cells.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      std::cerr << "[oef] cell " << cells[i].name << "\n";
      results[i] = RunExperiment(cells[i].cfg, &expert_cache);
    }
  };
  int threads = std::max(1, std::min<int>(sweep.workers,
                                          static_cast<int>(cells.size())));
  std::vector<std::future<void>> futures;
  for (int t = 0; t < threads; ++t) {
    futures.push_back(std::async(std::launch::async, worker));
  }
  for (auto& f : futures) f.get();

  std::string csv = sweep.out_dir + "/results.csv";
  WriteResultsCsv(csv, results);
  std::cout << "wrote " << csv << " (" << results.size() * 3 << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offline equilibrium finding toolkit"};
  app.require_subcommand(1);

  std::string game_id, data_path, out_path, kind = "random";
  std::string expert_policy_path, random_path, expert_path, model_path;
  std::string bc_path, mb_path, policy_path, results_path, config_path;
  std::string policy_out, manifest_path, x_axis = "rho", y_axis = "nashconv";
  std::string meta_name, oracle_name = "exact", methods_csv;
  int64_t size = 1000, expert_iters = 2000;
  uint64_t seed = 1;
  double rho = 0.5, alpha = 0.5, expert_threshold = 0.01, fault_cap = 0.05;
  int workers = 1, hidden = 0, batch = 0, epochs = 0;
  int iterations = 0, traversals = 0, regret_steps = 0, strategy_steps = 0;
  bool approx = false, eval_trace = false;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "RNG seed (OEF_SEED overrides)");
  };

  CLI::App* generate = app.add_subcommand("generate", "Generate a dataset");
  generate->add_option("--game", game_id, "Game id")->required();
  generate->add_option("--kind", kind, "random|expert|learning")
      ->check(CLI::IsMember({"random", "expert", "learning"}));
  generate->add_option("--size", size, "Number of transition records");
  generate->add_option("--out", out_path, "Output JSONL path")->required();
  generate->add_option("--expert-policy", expert_policy_path,
                       "Policy file for expert data (default: solve by CFR)");
  generate->add_option("--expert-iters", expert_iters, "CFR iterations");
  generate->add_option("--expert-threshold", expert_threshold,
                       "NashConv gate for expert data");
  generate->add_option("--workers", workers, "Parallel episode workers");
  add_seed(generate);

  CLI::App* mix = app.add_subcommand("mix", "Mix random and expert datasets");
  mix->add_option("--random", random_path, "Random dataset")->required();
  mix->add_option("--expert", expert_path, "Expert dataset")->required();
  mix->add_option("--rho", rho, "Proportion of random records")->required();
  mix->add_option("--size", size, "Target record count")->required();
  mix->add_option("--out", out_path, "Output JSONL path")->required();
  add_seed(mix);

  CLI::App* train_bc = app.add_subcommand("train-bc", "Train imitation policies");
  train_bc->add_option("--game", game_id)->required();
  train_bc->add_option("--data", data_path, "Dataset JSONL")->required();
  train_bc->add_option("--out", out_path, "Model output path")->required();
  train_bc->add_option("--policy-out", policy_out, "Tabulated policy output");
  train_bc->add_option("--hidden", hidden, "Hidden width (default: preset)");
  train_bc->add_option("--batch", batch, "Batch size (default: preset)");
  train_bc->add_option("--epochs", epochs, "Epochs (default: preset)");
  add_seed(train_bc);

  CLI::App* train_env =
      app.add_subcommand("train-env", "Train the dynamics model");
  train_env->add_option("--game", game_id)->required();
  train_env->add_option("--data", data_path, "Dataset JSONL")->required();
  train_env->add_option("--out", out_path, "Model output path")->required();
  train_env->add_option("--hidden", hidden, "Hidden width (default: preset)");
  train_env->add_option("--batch", batch, "Batch size (default: preset)");
  train_env->add_option("--epochs", epochs, "Epochs (default: preset)");
  add_seed(train_env);

  CLI::App* solve_psro =
      app.add_subcommand("solve-psro", "Equilibrium search on the model");
  solve_psro->add_option("--game", game_id)->required();
  solve_psro->add_option("--model", model_path, "Trained env model")->required();
  solve_psro->add_option("--out", out_path, "Policy output")->required();
  solve_psro->add_option("--iterations", iterations, "PSRO iterations");
  solve_psro->add_option("--meta", meta_name,
                         "uniform|matrix_nash_2p0s|alpha_rank");
  solve_psro->add_option("--oracle", oracle_name, "exact|qlearn");
  solve_psro->add_option("--fault-cap", fault_cap, "Decode-fault abort rate");
  solve_psro->add_option("--manifest", manifest_path, "Run manifest output");
  solve_psro->add_flag("--eval", eval_trace, "Trace exact NashConv per iteration");
  add_seed(solve_psro);

  CLI::App* solve_cfr =
      app.add_subcommand("solve-cfr", "Sampled CFR with nets on the model");
  solve_cfr->add_option("--game", game_id)->required();
  solve_cfr->add_option("--model", model_path, "Trained env model")->required();
  solve_cfr->add_option("--out", out_path, "Policy output")->required();
  solve_cfr->add_option("--iterations", iterations, "CFR iterations");
  solve_cfr->add_option("--traversals", traversals, "Traversals per player");
  solve_cfr->add_option("--hidden", hidden, "Net width");
  solve_cfr->add_option("--regret-steps", regret_steps, "SGD steps per retrain");
  solve_cfr->add_option("--strategy-steps", strategy_steps, "Final fit steps");
  solve_cfr->add_option("--fault-cap", fault_cap, "Decode-fault abort rate");
  solve_cfr->add_option("--manifest", manifest_path, "Run manifest output");
  add_seed(solve_cfr);

  CLI::App* combine = app.add_subcommand("combine", "Convex policy combination");
  combine->add_option("--game", game_id)->required();
  combine->add_option("--bc", bc_path, "Imitation policy file")->required();
  combine->add_option("--mb", mb_path, "Model-based policy file")->required();
  combine->add_option("--alpha", alpha, "Weight of the imitation policy")
      ->required();
  combine->add_option("--out", out_path, "Combined policy output")->required();

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "NashConv in the true game");
  evaluate->add_option("--game", game_id)->required();
  evaluate->add_option("--policy", policy_path, "Policy file")->required();
  evaluate->add_flag("--approx", approx,
                     "Sampled best response (forced for pttt)");
  add_seed(evaluate);

  CLI::App* sweep = app.add_subcommand("sweep", "Run an experiment grid");
  sweep->add_option("--config", config_path, "JSON config")->required();

  CLI::App* plot = app.add_subcommand("plot-data", "Aggregate results per panel");
  plot->add_option("--results", results_path, "results.csv")->required();
  plot->add_option("--out-dir", out_path, "Panel output directory")->required();
  plot->add_option("--x", x_axis, "rho|size");
  plot->add_option("--y", y_axis, "nashconv|alpha");
  plot->add_option("--methods", methods_csv, "Comma-separated method filter");

  CLI::App* stats = app.add_subcommand("tree-stats", "Game tree counts");
  stats->add_option("--game", game_id, "Game id (default: all enumerable)");

  CLI11_PARSE(app, argc, argv);
  bool seed_overridden = std::getenv("OEF_SEED") != nullptr;
  seed = MaybeEnvSeed(seed);

  try {
    if (*generate) {
      auto game = MakeGame(game_id);
      Dataset ds;
      if (kind == "random") {
        ds = GenerateRandom(*game, size, seed, workers);
      } else if (kind == "learning") {
        ds = GenerateLearning(*game, size, seed);
      } else {
        Profile expert = expert_policy_path.empty()
                             ? ComputeExpertProfile(*game, expert_iters)
                             : LoadProfileFor(expert_policy_path, game_id);
        ds = GenerateExpert(*game, size, seed, expert, expert_threshold, workers);
      }
      ValidateDataset(*game, ds);
      SaveDataset(ds, out_path);
      std::cout << "wrote " << out_path << " (" << ds.records.size()
                << " records)\n";
    } else if (*mix) {
      Dataset random_ds = LoadDataset(random_path);
      Dataset expert_ds = LoadDataset(expert_path);
      auto game = MakeGame(random_ds.meta.game_id);
      Dataset mixed = MixHybrid(random_ds, expert_ds, rho, size, seed);
      ValidateDataset(*game, mixed);
      SaveDataset(mixed, out_path);
      std::cout << "wrote " << out_path << "\n";
    } else if (*train_bc) {
      auto game = MakeGame(game_id);
      Dataset ds = LoadDataset(data_path);
      NetPreset preset = NearestPreset(BcPresets(), game_id, ds.meta.size);
      if (hidden > 0) preset.hidden = hidden;
      if (batch > 0) preset.batch = batch;
      if (epochs > 0) preset.epochs = epochs;
      BcModel model = TrainBc(*game, ds, preset.ToTrainConfig(seed));
      SaveBcModel(model, out_path);
      std::cout << "wrote " << out_path << "\n";
      if (!policy_out.empty()) {
        Catalog catalog = BuildCatalog(*game);
        SaveProfile(policy_out, BcPolicy(model, *game, catalog), game_id);
        std::cout << "wrote " << policy_out << "\n";
      }
    } else if (*train_env) {
      auto game = MakeGame(game_id);
      Dataset ds = LoadDataset(data_path);
      NetPreset preset = NearestPreset(EnvPresets(), game_id, ds.meta.size);
      if (hidden > 0) preset.hidden = hidden;
      if (batch > 0) preset.batch = batch;
      if (epochs > 0) preset.epochs = epochs;
      EnvModel model = TrainEnv(*game, ds, preset.ToTrainConfig(seed));
      SaveEnvModel(model, out_path);
      std::cout << "wrote " << out_path << " and sidecar\n";
    } else if (*solve_psro || *solve_cfr) {
      auto game = MakeGame(game_id);
      EnvModel env = LoadEnvModel(model_path);
      auto model = MakeLearnedModelGame(game, env);
      Catalog catalog;
      bool exact = game_id != "pttt";
      if (exact) catalog = BuildCatalog(*game);
      Profile policy;
      nlohmann::ordered_json manifest;
      manifest["game"] = game_id;
      manifest["model"] = model_path;
      manifest["seed"] = seed;
      if (*solve_psro) {
        PsroConfig cfg;
        if (iterations > 0) cfg.iterations = iterations;
        if (!meta_name.empty()) cfg.meta_solver = MetaSolverFromName(meta_name);
        if (oracle_name == "qlearn" || !exact) {
          cfg.oracle = BrOracleKind::kQLearning;
        }
        cfg.fault_cap = fault_cap;
        cfg.seed = seed;
        cfg.eval_each_iteration = eval_trace && exact;
        PsroResult result =
            OefPsro(*model, cfg, exact ? &catalog : nullptr, game.get());
        policy = std::move(result.policy);
        manifest["solver"] = "psro";
        manifest["iterations"] = cfg.iterations;
        manifest["decode_fault_rate"] = result.fault_rate;
        manifest["model_steps"] = result.model_steps;
        if (cfg.eval_each_iteration) {
          nlohmann::ordered_json trace = nlohmann::ordered_json::array();
          for (const auto& it : result.trace) trace.push_back(it.nash_conv);
          manifest["nashconv_trace"] = std::move(trace);
        }
      } else {
        DeepCfrConfig cfg;
        if (iterations > 0) cfg.iterations = iterations;
        if (traversals > 0) cfg.traversals = traversals;
        if (hidden > 0) cfg.hidden = hidden;
        if (regret_steps > 0) cfg.regret_sgd_steps = regret_steps;
        if (strategy_steps > 0) cfg.strategy_sgd_steps = strategy_steps;
        cfg.fault_cap = fault_cap;
        cfg.seed = seed;
        DeepCfrResult result = OefCfr(*model, cfg, catalog);
        policy = std::move(result.policy);
        manifest["solver"] = "cfr";
        manifest["iterations"] = cfg.iterations;
        manifest["traversals"] = cfg.traversals;
        manifest["decode_fault_rate"] = result.fault_rate;
        manifest["model_steps"] = result.model_steps;
      }
      SaveProfile(out_path, policy, game_id);
      std::cout << "wrote " << out_path << "\n";
      if (!manifest_path.empty()) {
        std::ofstream out(manifest_path, std::ios::binary);
        out << manifest.dump(2) << "\n";
        std::cout << "wrote " << manifest_path << "\n";
      }
    } else if (*combine) {
      auto game = MakeGame(game_id);
      Catalog catalog = BuildCatalog(*game);
      Profile bc = LoadProfileFor(bc_path, game_id);
      Profile mb = LoadProfileFor(mb_path, game_id);
      SaveProfile(out_path, CombineProfiles(bc, mb, alpha, catalog), game_id);
      std::cout << "wrote " << out_path << "\n";
    } else if (*evaluate) {
      auto game = MakeGame(game_id);
      Profile policy = LoadProfileFor(policy_path, game_id);
      if (approx || game_id == "pttt") {
        ApproxEvalConfig cfg;
        ApproxNashConvResult result =
            ApproxNashConv(*game, ProfileStrategy(policy), cfg, seed);
        std::cout << "nashconv_approx " << FormatDouble(result.nash_conv) << "\n";
        for (size_t p = 0; p < result.br_values.size(); ++p) {
          std::cout << "player" << p << "_approx "
                    << FormatDouble(result.br_values[p] -
                                    result.profile_values[p])
                    << "\n";
        }
      } else {
        NashConvResult result = NashConv(*game, policy);
        std::cout << "nashconv " << FormatDouble(result.nash_conv) << "\n";
        for (size_t p = 0; p < result.per_player.size(); ++p) {
          std::cout << "player" << p << " " << FormatDouble(result.per_player[p])
                    << "\n";
        }
      }
    } else if (*sweep) {
      return RunSweep(LoadSweepConfig(config_path), seed, seed_overridden);
    } else if (*plot) {
      std::vector<std::string> methods;
      std::stringstream ss(methods_csv);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) methods.push_back(item);
      }
      EmitPlotData(LoadResultsCsv(results_path), out_path, x_axis, y_axis,
                   methods);
      std::cout << "wrote panels to " << out_path << "\n";
    } else if (*stats) {
      std::vector<std::string> ids =
          game_id.empty() ? std::vector<std::string>{"kuhn2", "kuhn3", "kuhn4",
                                                     "kuhn5", "leduc2", "liars2",
                                                     "liars3", "liars6"}
                          : std::vector<std::string>{game_id};
      nlohmann::ordered_json out;
      for (const std::string& id : ids) {
        TreeCounts counts = CountTree(*MakeGame(id));
        int64_t infosets = 0;
        for (int64_t c : counts.infosets_per_player) infosets += c;
        out[id] = {{"histories", counts.histories},
                   {"terminals", counts.terminals},
                   {"infosets", infosets}};
      }
      std::cout << out.dump(2) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
