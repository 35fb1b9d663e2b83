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

#ifndef OEF_POLICY_HPP_
#define OEF_POLICY_HPP_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "oef/game.hpp"

namespace oef {

inline constexpr Player kJointPolicy = -3;

// A behavioral strategy: per-infoset distributions over that infoset's
// legal actions, in ascending action order. Missing infosets are treated
// as uniform by every consumer, so partially-trained policies evaluate
// totally.
struct Policy {
  Player owner = kJointPolicy;
  std::map<std::string, std::vector<double>> table;

  bool Has(const std::string& key) const { return table.count(key) > 0; }

  std::vector<double> ProbsOrUniform(const std::string& key,
                                     size_t num_legal) const {
    auto it = table.find(key);
    if (it != table.end()) return it->second;
    return std::vector<double>(num_legal, 1.0 / static_cast<double>(num_legal));
  }
};

// One policy per player.
using Profile = std::vector<Policy>;

// Strategy callback used by the tree-walking algorithms: returns the
// distribution over `legal` at the given infoset.
using StrategyFn = std::function<std::vector<double>(
    const InfoSetKey&, const std::vector<Action>& legal)>;

StrategyFn ProfileStrategy(const Profile& profile);
StrategyFn UniformStrategy();

Profile UniformProfile(int num_players);

// Throws unless every stored vector is nonnegative and sums to 1 within
// 1e-9.
void ValidatePolicy(const Policy& policy);

void SaveProfile(const std::string& path, const Profile& profile,
                 const std::string& game_id);
std::pair<Profile, std::string> LoadProfile(const std::string& path);

}  // namespace oef

#endif  // OEF_POLICY_HPP_
