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

#ifndef OEF_DATASET_HPP_
#define OEF_DATASET_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "oef/game.hpp"
#include "oef/policy.hpp"

namespace oef {

// One logged environment step. Chance moves are logged too (actor = -1) so
// a dynamics model can learn the chance distribution.
struct TransitionRecord {
  int64_t episode = 0;
  int64_t step = 0;
  int actor = 0;  // player index, -1 for chance
  std::vector<double> state;
  Action action = 0;
  std::vector<uint8_t> legal_mask;
  std::vector<double> next_state;
  std::vector<double> rewards;
  bool terminal = false;
  std::vector<uint8_t> next_legal_mask;
};

struct DatasetMeta {
  std::string game_id;
  std::string kind;  // random | expert | learning | hybrid
  double rho = 0.0;  // proportion of random data, hybrid only
  int64_t size = 0;
  uint64_t seed = 0;
  int generator_version = 1;
};

struct Dataset {
  DatasetMeta meta;
  std::vector<TransitionRecord> records;
};

std::vector<uint8_t> MaskFromLegal(const std::vector<Action>& legal,
                                   int max_actions);

// Episodes sampled from an arbitrary strategy, every transition logged,
// budget in transitions. Per-episode derived seeds make the output
// independent of `workers`.
Dataset GenerateFromStrategy(const Game& game, const StrategyFn& strategy,
                             const std::string& kind, int64_t num_records,
                             uint64_t seed, int workers = 1);

// Episodes of uniform play.
Dataset GenerateRandom(const Game& game, int64_t num_records, uint64_t seed,
                       int workers = 1);

// Episodes sampled from a near-equilibrium profile. Throws
// Error("not-expert") when the profile's NashConv exceeds the threshold.
Dataset GenerateExpert(const Game& game, int64_t num_records, uint64_t seed,
                       const Profile& ne_profile,
                       double nash_conv_threshold = 0.01, int workers = 1);

// Logs every environment interaction of an external-sampling MCCFR run
// from scratch; early records reflect near-uniform play, late ones
// near-equilibrium play.
Dataset GenerateLearning(const Game& game, int64_t num_records, uint64_t seed);

// round(rho * target_size) records sampled without replacement from the
// random dataset, the rest from the expert dataset, shuffled. Episode ids
// are renumbered to stay unique.
Dataset MixHybrid(const Dataset& random_ds, const Dataset& expert_ds,
                  double rho, int64_t target_size, uint64_t seed);

// JSONL with a "#META " header line; bit-exact round trip.
void SaveDataset(const Dataset& dataset, const std::string& path);
Dataset LoadDataset(const std::string& path);

// Record invariants plus replay validity: every transition must be
// reproducible by the game engine from the decoded state.
void ValidateDataset(const Game& game, const Dataset& dataset);

}  // namespace oef

#endif  // OEF_DATASET_HPP_
