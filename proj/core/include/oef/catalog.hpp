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

#ifndef OEF_CATALOG_HPP_
#define OEF_CATALOG_HPP_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "oef/game.hpp"

namespace oef {

// Depth-first enumeration of the full game tree, children in ascending
// action order. Throws Error("enumeration-budget") past `node_budget` nodes
// when the budget is nonnegative.
void ForEachHistory(
    const Game& game,
    const std::function<void(const History&, const NodeView&)>& visit,
    int64_t node_budget = -1);

struct InfosetInfo {
  std::vector<Action> legal;
  std::vector<double> tensor;
  // The same player's previous decision point on any path reaching this
  // infoset, with the action taken there. Unique under perfect recall;
  // empty parent_key at the player's first decision.
  std::string parent_key;
  Action parent_action = -1;
  int64_t visits = 0;  // number of histories grouped into this infoset
};

// All reachable decision infosets per player.
struct Catalog {
  std::vector<std::map<std::string, InfosetInfo>> per_player;
  int64_t num_histories = 0;
  int64_t num_terminals = 0;

  int64_t NumInfosets() const {
    int64_t total = 0;
    for (const auto& m : per_player) total += static_cast<int64_t>(m.size());
    return total;
  }
};

Catalog BuildCatalog(const Game& game, int64_t node_budget = -1);

struct TreeCounts {
  int64_t histories = 0;
  int64_t terminals = 0;
  std::vector<int64_t> infosets_per_player;
};

TreeCounts CountTree(const Game& game, int64_t node_budget = -1);

// {0,1} tensors packed as '0'/'1' strings; the canonical form used for
// set membership, file sidecars and checksums.
std::string PackTensor(std::span<const double> tensor);
std::vector<double> UnpackTensor(const std::string& packed);

// All distinct joint state encodings reachable in the game, sorted.
std::vector<std::string> EnumerateStateTensors(const Game& game,
                                               int64_t node_budget = -1);

// FNV-1a over a byte string; used for file/cache checksums.
uint64_t Fnv1a64(std::string_view bytes);

}  // namespace oef

#endif  // OEF_CATALOG_HPP_
