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

#ifndef OEF_PIPELINE_HPP_
#define OEF_PIPELINE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "oef/behavior_cloning.hpp"
#include "oef/oef_solvers.hpp"

namespace oef {

// ---------------------------------------------------------------------------
// Named training presets (hidden size / batch size / epochs per game and
// dataset size), e.g. "kuhn2_500".
// ---------------------------------------------------------------------------

struct NetPreset {
  std::string game_id;
  int64_t data_size = 0;
  int hidden = 32;
  int batch = 32;
  int epochs = 1000;

  std::string Name() const { return game_id + "_" + std::to_string(data_size); }
  TrainConfig ToTrainConfig(uint64_t seed) const {
    TrainConfig cfg;
    cfg.hidden_size = hidden;
    cfg.batch_size = batch;
    cfg.epochs = epochs;
    cfg.seed = seed;
    return cfg;
  }
};

const std::vector<NetPreset>& BcPresets();
const std::vector<NetPreset>& EnvPresets();

std::optional<NetPreset> FindPreset(const std::vector<NetPreset>& presets,
                                    const std::string& game_id, int64_t size);
// Exact (game, size) hit, else the row for this game with the nearest size.
NetPreset NearestPreset(const std::vector<NetPreset>& presets,
                        const std::string& game_id, int64_t size);

// ---------------------------------------------------------------------------
// Policy combination and weight selection
// ---------------------------------------------------------------------------

// Convex combination alpha * bc + (1 - alpha) * mb, per infoset.
struct CombinedPolicy {
  Profile bc;
  Profile mb;
  double alpha = 0.5;
};

std::vector<double> DefaultAlphaGrid();  // {0, 0.1, ..., 1.0}

// Tabulates the combination over every reachable infoset (missing entries
// in either input count as uniform).
Profile CombineProfiles(const Profile& bc, const Profile& mb, double alpha,
                        const Catalog& catalog);

struct AlphaSelection {
  double best_alpha = 0;
  double best_nash_conv = 0;
  std::vector<std::pair<double, double>> table;  // (alpha, NashConv)
};

// Exact NashConv in the true game for every grid point; argmin with ties
// resolved toward the smaller alpha.
AlphaSelection SelectBestAlpha(const Game& game, const Profile& bc,
                               const Profile& mb, const Catalog& catalog,
                               const std::vector<double>& grid = DefaultAlphaGrid());

// ---------------------------------------------------------------------------
// Approximate evaluation for games too large for exact best response
// ---------------------------------------------------------------------------

struct ApproxEvalConfig {
  QLearnConfig qlearn{/*episodes=*/50000, /*learning_rate=*/0.1,
                      /*epsilon=*/0.2, /*eval_episodes=*/5000};
  int br_seeds = 3;             // report the max over seeds
  int64_t value_episodes = 20000;  // Monte Carlo profile-value estimate
};

struct ApproxNashConvResult {
  double nash_conv = 0;
  std::vector<double> br_values;
  std::vector<double> profile_values;
};

ApproxNashConvResult ApproxNashConv(const Game& game, const StrategyFn& profile,
                                    const ApproxEvalConfig& cfg, uint64_t seed);

// ---------------------------------------------------------------------------
// End-to-end experiment
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  std::string game_id = "kuhn2";
  std::string kind = "hybrid";  // random | expert | learning | hybrid
  double rho = 0.5;             // hybrid only
  int64_t size = 5000;
  uint64_t seed = 1;
  std::string solver = "psro";  // psro | cfr
  std::string out_dir;          // artifacts written here when nonempty

  std::optional<NetPreset> bc_preset;   // default: nearest table row
  std::optional<NetPreset> env_preset;  // default: nearest table row
  int64_t expert_cfr_iters = 2000;
  double expert_threshold = 0.01;
  PsroConfig psro;
  DeepCfrConfig cfr;
  std::vector<double> alpha_grid = DefaultAlphaGrid();
  int workers = 1;
};

struct ExperimentResult {
  std::string game_id, kind, solver;
  double rho = 0;
  int64_t size = 0;
  uint64_t seed = 0;
  double bc_nash_conv = 0;
  double mb_nash_conv = 0;
  double combined_nash_conv = 0;
  double best_alpha = 0;
  std::vector<std::pair<double, double>> alpha_table;
  double fault_rate = 0;
  bool approximate = false;  // evaluation used sampled best responses
  double wall_seconds = 0;
  std::map<std::string, uint64_t> checksums;  // per written artifact
};

// Profiles an experiment can hand back for further use (acceptance checks).
struct ExperimentArtifacts {
  Profile bc;
  Profile mb;
  Profile combined;
};

// generate/mix -> train-bc -> train-env -> solve -> combine -> evaluate.
// Any stage failure is rethrown with the stage name prefixed. A non-null
// `expert_cache` memoizes the CFR expert profile across cells.
ExperimentResult RunExperiment(const ExperimentConfig& cfg,
                               std::map<std::string, Profile>* expert_cache = nullptr,
                               ExperimentArtifacts* artifacts = nullptr);

// Shortest-round-trip decimal formatting used by every CSV writer.
std::string FormatDouble(double value);

std::string ResultCsvHeader();
std::string ResultCsvRow(const ExperimentResult& result, const std::string& method);
void WriteResultsCsv(const std::string& path,
                     const std::vector<ExperimentResult>& results);

struct CsvRow {
  std::string game, kind, solver, method;
  double rho = 0;
  int64_t size = 0;
  uint64_t seed = 0;
  double alpha = 0;
  double nash_conv = 0;
  bool approximate = false;
};

std::vector<CsvRow> LoadResultsCsv(const std::string& path);

// One file per figure panel: x = rho or size, y = NashConv (or best alpha),
// mean and standard deviation over seeds. Header: x,method,mean,stddev,n.
// Throws Error("empty-method") when the method filter removes everything.
void EmitPlotData(const std::vector<CsvRow>& rows, const std::string& out_dir,
                  const std::string& x_axis, const std::string& y_axis,
                  const std::vector<std::string>& methods = {});

// The CFR expert profile used by expert/hybrid dataset generation.
Profile ComputeExpertProfile(const Game& game, int64_t iterations);

}  // namespace oef

#endif  // OEF_PIPELINE_HPP_
