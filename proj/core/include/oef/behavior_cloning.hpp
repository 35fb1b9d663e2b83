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

#ifndef OEF_BEHAVIOR_CLONING_HPP_
#define OEF_BEHAVIOR_CLONING_HPP_

#include <string>
#include <vector>

#include "oef/catalog.hpp"
#include "oef/dataset.hpp"
#include "oef/net.hpp"
#include "oef/policy.hpp"

namespace oef {

// Per-player imitation networks trained on (infoset tensor, action) pairs.
struct BcModel {
  std::string game_id;
  std::vector<Net> nets;       // softmax head, one per player
  std::vector<bool> trained;   // false: no records, acts uniformly
};

// Trains one policy net per player on the actor's infoset slice of each
// record; chance records are excluded. Players without records fall back
// to uniform with a warning on stderr.
BcModel TrainBc(const Game& game, const Dataset& dataset,
                const TrainConfig& cfg);

// Net output for one player at one infoset, masked to the legal actions
// and renormalized (full-width vector).
std::vector<double> BcProbs(const BcModel& model, Player p,
                            std::span<const double> infoset_tensor,
                            const std::vector<uint8_t>& legal_mask);

// Tabulates the model over every reachable infoset into a total Policy.
Profile BcPolicy(const BcModel& model, const Game& game,
                 const Catalog& catalog);

void SaveBcModel(const BcModel& model, const std::string& path);
BcModel LoadBcModel(const std::string& path);

}  // namespace oef

#endif  // OEF_BEHAVIOR_CLONING_HPP_
