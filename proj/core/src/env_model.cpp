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

#include "oef/env_model.hpp"

#include <algorithm>
#include <set>

#include "oef/catalog.hpp"

namespace oef {

namespace {

Eigen::MatrixXd BuildInputs(const Game& game,
                            const std::vector<TransitionRecord>& records,
                            bool zero_action) {
  const int state_dim = game.Dims().joint;
  const int in_dim = state_dim + game.MaxActions();
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(records.size(), in_dim);
  for (size_t r = 0; r < records.size(); ++r) {
    for (int c = 0; c < state_dim; ++c) X(r, c) = records[r].state[c];
    if (!zero_action) X(r, state_dim + records[r].action) = 1.0;
  }
  return X;
}

}  // namespace

EnvModel TrainEnv(const Game& game, const Dataset& dataset,
                  const TrainConfig& cfg) {
  Check(dataset.meta.game_id == game.id(), "env: dataset from a different game");
  Check(!dataset.records.empty(), "env: empty dataset");
  const int n = game.NumPlayers();
  const int state_dim = game.Dims().joint;
  const int max_actions = game.MaxActions();
  const int in_dim = state_dim + max_actions;
  const auto& records = dataset.records;

  std::vector<MultiHeadNet::HeadSpec> specs = {
      {kHeadNextState, state_dim, HeadKind::kLinear, LossKind::kMse, 1.0},
      {kHeadRewards, n, HeadKind::kLinear, LossKind::kMse, 1.0},
      {kHeadTerminal, 1, HeadKind::kSigmoid, LossKind::kMse, 1.0},
      {kHeadNextLegal, max_actions, HeadKind::kSigmoid, LossKind::kMse, 1.0},
      {kHeadChance, max_actions, HeadKind::kSoftmax, LossKind::kCrossEntropy, 1.0},
  };

  EnvModel model;
  model.game_id = game.id();
  model.state_dim = state_dim;
  model.max_actions = max_actions;
  model.net = MultiHeadNet({in_dim, cfg.hidden_size}, specs,
                           DeriveSeed(cfg.seed, 0xE0));

  // Targets for the transition heads (all records, action block set).
  Eigen::MatrixXd X = BuildInputs(game, records, /*zero_action=*/false);
  Eigen::MatrixXd Tstate(records.size(), state_dim);
  Eigen::MatrixXd Trewards = Eigen::MatrixXd::Zero(records.size(), n);
  Eigen::MatrixXd Tterm(records.size(), 1);
  Eigen::MatrixXd Tlegal(records.size(), max_actions);
  std::vector<uint8_t> terminal_rows(records.size());
  for (size_t r = 0; r < records.size(); ++r) {
    for (int c = 0; c < state_dim; ++c) Tstate(r, c) = records[r].next_state[c];
    for (int c = 0; c < n; ++c) Trewards(r, c) = records[r].rewards[c];
    Tterm(r, 0) = records[r].terminal ? 1.0 : 0.0;
    for (int c = 0; c < max_actions; ++c) {
      Tlegal(r, c) = records[r].next_legal_mask[c] ? 1.0 : 0.0;
    }
    terminal_rows[r] = records[r].terminal ? 1 : 0;
  }

  // Chance records, trained separately with a zeroed action block.
  std::vector<TransitionRecord> chance_records;
  for (const TransitionRecord& rec : records) {
    if (rec.actor < 0) chance_records.push_back(rec);
  }
  Eigen::MatrixXd Xc, Tchance;
  if (!chance_records.empty()) {
    Xc = BuildInputs(game, chance_records, /*zero_action=*/true);
    Tchance = Eigen::MatrixXd::Zero(chance_records.size(), max_actions);
    for (size_t r = 0; r < chance_records.size(); ++r) {
      Tchance(r, chance_records[r].action) = 1.0;
    }
  }

  std::vector<MultiHeadNet::HeadBatch> main_pass(specs.size());
  main_pass[0] = {&Tstate, nullptr, nullptr};
  main_pass[1] = {&Trewards, &terminal_rows, nullptr};  // terminal rows only
  main_pass[2] = {&Tterm, nullptr, nullptr};
  main_pass[3] = {&Tlegal, nullptr, nullptr};
  main_pass[4] = {};  // chance head skipped here

  std::vector<MultiHeadNet::HeadBatch> chance_pass(specs.size());
  if (!chance_records.empty()) chance_pass[4] = {&Tchance, nullptr, nullptr};

  Rng shuffle(DeriveSeed(cfg.seed, 0xE1));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    model.net.TrainEpoch(X, main_pass, cfg, shuffle);
    if (!chance_records.empty()) {
      model.net.TrainEpoch(Xc, chance_pass, cfg, shuffle);
    }
  }

  // Sidecar: distinct observed states (both sides of each transition) and
  // the root legal mask seen in the data.
  std::set<std::string> states;
  std::string root_packed = PackTensor(game.EncodeState({}).joint);
  model.root_legal_mask.clear();
  for (const TransitionRecord& rec : records) {
    states.insert(PackTensor(rec.state));
    states.insert(PackTensor(rec.next_state));
    if (model.root_legal_mask.empty() && PackTensor(rec.state) == root_packed) {
      model.root_legal_mask = rec.legal_mask;
    }
  }
  if (model.root_legal_mask.empty()) {
    // No episode started at the root in this dataset slice; fall back to
    // the game metadata so the solvers still have an entry point.
    model.root_legal_mask =
        MaskFromLegal(game.Root().LegalActions(), max_actions);
  }
  model.observed_states.assign(states.begin(), states.end());

  std::string all;
  for (const std::string& s : model.observed_states) all += s;
  model.dataset_checksum = Fnv1a64(all);
  return model;
}

std::vector<std::vector<double>> EnvForward(const EnvModel& model,
                                            std::span<const double> state,
                                            Action action) {
  std::vector<double> input(model.state_dim + model.max_actions, 0.0);
  std::copy(state.begin(), state.end(), input.begin());
  if (action >= 0) input[model.state_dim + action] = 1.0;
  Eigen::VectorXd x =
      Eigen::Map<const Eigen::VectorXd>(input.data(), input.size());
  std::vector<Eigen::VectorXd> ys = model.net.Forward(x);
  std::vector<std::vector<double>> out;
  out.reserve(ys.size());
  for (const Eigen::VectorXd& y : ys) {
    out.emplace_back(y.data(), y.data() + y.size());
  }
  return out;
}

void SaveEnvModel(const EnvModel& model, const std::string& path) {
  SaveNetJson(model.net.ToJson(), path);
  nlohmann::ordered_json sidecar;
  sidecar["format"] = "oef-env-sidecar";
  sidecar["version"] = 1;
  sidecar["game"] = model.game_id;
  sidecar["state_dim"] = model.state_dim;
  sidecar["max_actions"] = model.max_actions;
  sidecar["root_legal_mask"] =
      std::vector<int>(model.root_legal_mask.begin(), model.root_legal_mask.end());
  sidecar["decode_cache_checksum"] = model.dataset_checksum;
  sidecar["observed_states"] = model.observed_states;
  SaveNetJson(sidecar, path + ".sidecar.json");
}

EnvModel LoadEnvModel(const std::string& path) {
  EnvModel model;
  model.net = MultiHeadNet::FromJson(LoadNetJson(path));
  nlohmann::json sidecar = LoadNetJson(path + ".sidecar.json");
  Check(sidecar.value("format", "") == "oef-env-sidecar",
        "env: bad sidecar format");
  model.game_id = sidecar.at("game").get<std::string>();
  model.state_dim = sidecar.at("state_dim").get<int>();
  model.max_actions = sidecar.at("max_actions").get<int>();
  for (int b : sidecar.at("root_legal_mask").get<std::vector<int>>()) {
    model.root_legal_mask.push_back(b != 0);
  }
  model.observed_states =
      sidecar.at("observed_states").get<std::vector<std::string>>();
  model.dataset_checksum = sidecar.at("decode_cache_checksum").get<uint64_t>();
  std::string all;
  for (const std::string& s : model.observed_states) all += s;
  Check(Fnv1a64(all) == model.dataset_checksum,
        "env: decode cache checksum mismatch");
  return model;
}

}  // namespace oef
