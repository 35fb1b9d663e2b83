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

#ifndef OEF_ENV_MODEL_HPP_
#define OEF_ENV_MODEL_HPP_

#include <string>
#include <vector>

#include "oef/dataset.hpp"
#include "oef/game.hpp"
#include "oef/net.hpp"

namespace oef {

// Learned dynamics: a shared trunk on (joint state, one-hot action) with
// heads for the next state, terminal rewards, the terminal flag, the next
// legal-action mask, and the chance distribution. The chance head is
// trained and queried with a zeroed action block since it only depends on
// the state.
struct EnvModel {
  std::string game_id;
  MultiHeadNet net;
  // Sidecar payload: distinct state encodings seen in training (packed),
  // plus the root legal mask observed in the data.
  std::vector<std::string> observed_states;
  std::vector<uint8_t> root_legal_mask;
  uint64_t dataset_checksum = 0;

  int StateDim() const { return state_dim; }
  int state_dim = 0;
  int max_actions = 0;
};

// Head names in fixed order.
inline constexpr const char* kHeadNextState = "next_state";
inline constexpr const char* kHeadRewards = "rewards";
inline constexpr const char* kHeadTerminal = "terminal";
inline constexpr const char* kHeadNextLegal = "next_legal_mask";
inline constexpr const char* kHeadChance = "chance_policy";

EnvModel TrainEnv(const Game& game, const Dataset& dataset,
                  const TrainConfig& cfg);

// Raw head evaluations for (state, action); action < 0 zeroes the action
// block (used for the chance head).
std::vector<std::vector<double>> EnvForward(const EnvModel& model,
                                            std::span<const double> state,
                                            Action action);

// Writes <path> (net) and <path>.sidecar.json (game id, head dims,
// observed-state cache, checksums).
void SaveEnvModel(const EnvModel& model, const std::string& path);
EnvModel LoadEnvModel(const std::string& path);

}  // namespace oef

#endif  // OEF_ENV_MODEL_HPP_
