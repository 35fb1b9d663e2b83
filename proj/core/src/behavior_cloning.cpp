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

#include "oef/behavior_cloning.hpp"

#include <future>
#include <iostream>

namespace oef {

BcModel TrainBc(const Game& game, const Dataset& dataset,
                const TrainConfig& cfg) {
  Check(dataset.meta.game_id == game.id(), "bc: dataset from a different game");
  const int n = game.NumPlayers();
  const int in_dim = game.Dims().per_player;
  const int out_dim = game.MaxActions();

  // Split training pairs by actor; chance records carry no imitation signal.
  std::vector<std::vector<const TransitionRecord*>> by_player(n);
  for (const TransitionRecord& rec : dataset.records) {
    if (rec.actor >= 0) by_player[rec.actor].push_back(&rec);
  }

  BcModel model;
  model.game_id = game.id();
  model.nets.resize(n);
  model.trained.assign(n, false);

  auto train_player = [&](Player p) {
    const auto& rows = by_player[p];
    Net net({in_dim, cfg.hidden_size, out_dim}, HeadKind::kSoftmax,
            DeriveSeed(cfg.seed, 0xBC00 + p));
    if (rows.empty()) return net;
    Eigen::MatrixXd X(rows.size(), in_dim);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(rows.size(), out_dim);
    for (size_t r = 0; r < rows.size(); ++r) {
      for (int c = 0; c < in_dim; ++c) {
        X(r, c) = rows[r]->state[game.InfosetOffset(p) + c];
      }
      T(r, rows[r]->action) = 1.0;  // one-hot observed action
    }
    BatchRef data{&X, &T, nullptr, nullptr};
    Rng shuffle(DeriveSeed(cfg.seed, 0xBC80 + p));
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      net.TrainEpoch(data, LossKind::kCrossEntropy, cfg, shuffle);
    }
    return net;
  };

  // Per-player trainings are independent.
  std::vector<std::future<Net>> futures;
  futures.reserve(n);
  for (Player p = 0; p < n; ++p) {
    futures.push_back(std::async(std::launch::async, train_player, p));
  }
  for (Player p = 0; p < n; ++p) {
    model.nets[p] = futures[p].get();
    model.trained[p] = !by_player[p].empty();
    if (!model.trained[p]) {
      std::cerr << "[oef] warning: no records for player " << p
                << "; policy defaults to uniform\n";
    }
  }
  return model;
}

std::vector<double> BcProbs(const BcModel& model, Player p,
                            std::span<const double> infoset_tensor,
                            const std::vector<uint8_t>& legal_mask) {
  int legal = 0;
  for (uint8_t b : legal_mask) legal += b;
  Check(legal > 0, "bc: empty legal mask");
  if (!model.trained[p]) {
    std::vector<double> probs(legal_mask.size(), 0.0);
    for (size_t i = 0; i < legal_mask.size(); ++i) {
      if (legal_mask[i]) probs[i] = 1.0 / legal;
    }
    return probs;
  }
  // Inference-time masking keeps the distribution on legal actions; the
  // nets themselves are trained with a plain softmax.
  std::vector<double> pre = model.nets[p].Forward(infoset_tensor);
  std::vector<double> probs(pre.size(), 0.0);
  double total = 0;
  for (size_t i = 0; i < pre.size(); ++i) {
    if (legal_mask[i]) total += (probs[i] = pre[i]);
  }
  if (total <= 0) {
    for (size_t i = 0; i < probs.size(); ++i) {
      probs[i] = legal_mask[i] ? 1.0 / legal : 0.0;
    }
    return probs;
  }
  for (double& x : probs) x /= total;
  return probs;
}

Profile BcPolicy(const BcModel& model, const Game& game,
                 const Catalog& catalog) {
  Check(model.game_id == game.id(), "bc: model from a different game");
  Profile profile = UniformProfile(game.NumPlayers());
  for (Player p = 0; p < game.NumPlayers(); ++p) {
    for (const auto& [key, info] : catalog.per_player[p]) {
      std::vector<uint8_t> mask = MaskFromLegal(info.legal, game.MaxActions());
      std::vector<double> full = BcProbs(model, p, info.tensor, mask);
      std::vector<double> probs;
      probs.reserve(info.legal.size());
      for (Action a : info.legal) probs.push_back(full[a]);
      profile[p].table[key] = std::move(probs);
    }
    ValidatePolicy(profile[p]);
  }
  return profile;
}

void SaveBcModel(const BcModel& model, const std::string& path) {
  nlohmann::ordered_json j;
  j["format"] = "oef-bc-model";
  j["version"] = 1;
  j["game"] = model.game_id;
  j["trained"] = model.trained;
  nlohmann::ordered_json nets = nlohmann::ordered_json::array();
  for (const Net& net : model.nets) nets.push_back(net.ToJson());
  j["nets"] = std::move(nets);
  SaveNetJson(j, path);
}

BcModel LoadBcModel(const std::string& path) {
  nlohmann::json j = LoadNetJson(path);
  Check(j.value("format", "") == "oef-bc-model", "bc: bad format tag");
  BcModel model;
  model.game_id = j.at("game").get<std::string>();
  model.trained = j.at("trained").get<std::vector<bool>>();
  for (const auto& nj : j.at("nets")) model.nets.push_back(Net::FromJson(nj));
  Check(model.nets.size() == model.trained.size(), "bc: corrupt model file");
  return model;
}

}  // namespace oef
