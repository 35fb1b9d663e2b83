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

#include "oef/policy.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace oef {

StrategyFn ProfileStrategy(const Profile& profile) {
  return [&profile](const InfoSetKey& infoset,
                    const std::vector<Action>& legal) -> std::vector<double> {
    if (infoset.player >= 0 && infoset.player < static_cast<int>(profile.size())) {
      return profile[infoset.player].ProbsOrUniform(infoset.key, legal.size());
    }
    return std::vector<double>(legal.size(), 1.0 / static_cast<double>(legal.size()));
  };
}

StrategyFn UniformStrategy() {
  return [](const InfoSetKey&, const std::vector<Action>& legal) {
    return std::vector<double>(legal.size(), 1.0 / static_cast<double>(legal.size()));
  };
}

Profile UniformProfile(int num_players) {
  Profile profile(num_players);
  for (int p = 0; p < num_players; ++p) profile[p].owner = p;
  return profile;
}

void ValidatePolicy(const Policy& policy) {
  for (const auto& [key, probs] : policy.table) {
    Check(!probs.empty(), "policy: empty distribution at " + key);
    double total = 0;
    for (double x : probs) {
      Check(x >= 0.0 && std::isfinite(x), "policy: bad probability at " + key);
      total += x;
    }
    Check(std::abs(total - 1.0) <= 1e-9, "policy: unnormalized at " + key);
  }
}

void SaveProfile(const std::string& path, const Profile& profile,
                 const std::string& game_id) {
  nlohmann::ordered_json root;
  root["format"] = "oef-policy";
  root["version"] = 1;
  root["game"] = game_id;
  nlohmann::ordered_json players = nlohmann::ordered_json::array();
  for (const Policy& policy : profile) {
    nlohmann::ordered_json table = nlohmann::ordered_json::object();
    for (const auto& [key, probs] : policy.table) table[key] = probs;
    players.push_back(std::move(table));
  }
  root["players"] = std::move(players);
  std::ofstream out(path, std::ios::binary);
  Check(out.good(), "policy: cannot write " + path);
  out << root.dump(2) << "\n";
}

std::pair<Profile, std::string> LoadProfile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Check(in.good(), "policy: cannot read " + path);
  nlohmann::json root = nlohmann::json::parse(in, nullptr, true);
  Check(root.value("format", "") == "oef-policy", "policy: bad format tag");
  Profile profile;
  for (const auto& table : root.at("players")) {
    Policy policy;
    policy.owner = static_cast<int>(profile.size());
    for (auto it = table.begin(); it != table.end(); ++it) {
      policy.table[it.key()] = it.value().get<std::vector<double>>();
    }
    ValidatePolicy(policy);
    profile.push_back(std::move(policy));
  }
  return {std::move(profile), root.at("game").get<std::string>()};
}

}  // namespace oef
