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

#include "oef/catalog.hpp"

#include <algorithm>
#include <set>

namespace oef {

void ForEachHistory(
    const Game& game,
    const std::function<void(const History&, const NodeView&)>& visit,
    int64_t node_budget) {
  int64_t count = 0;
  std::vector<Action> actions;
  auto rec = [&](auto&& self) -> void {
    if (node_budget >= 0 && ++count > node_budget) {
      Fatal("enumeration-budget: tree exceeds " + std::to_string(node_budget) +
            " nodes");
    }
    NodeView view = game.Analyze(actions);
    visit(History(&game, actions), view);
    for (Action a : view.legal) {
      actions.push_back(a);
      self(self);
      actions.pop_back();
    }
  };
  rec(rec);
}

Catalog BuildCatalog(const Game& game, int64_t node_budget) {
  Catalog catalog;
  catalog.per_player.resize(game.NumPlayers());
  // (key, action) pair of the acting player's previous decision, per player,
  // maintained along the DFS stack.
  std::vector<std::vector<std::pair<std::string, Action>>> trail(game.NumPlayers());

  int64_t count = 0;
  std::vector<Action> actions;
  auto rec = [&](auto&& self) -> void {
    if (node_budget >= 0 && ++count > node_budget) {
      Fatal("enumeration-budget: tree exceeds " + std::to_string(node_budget) +
            " nodes");
    }
    ++catalog.num_histories;
    NodeView view = game.Analyze(actions);
    if (view.IsTerminal()) {
      ++catalog.num_terminals;
      return;
    }
    if (!view.IsChance()) {
      Player p = view.to_move;
      InfoSetKey key = game.Infoset(actions, p);
      auto [it, inserted] = catalog.per_player[p].try_emplace(key.key);
      if (inserted) {
        it->second.legal = view.legal;
        it->second.tensor = key.tensor;
        if (!trail[p].empty()) {
          it->second.parent_key = trail[p].back().first;
          it->second.parent_action = trail[p].back().second;
        }
      } else {
        Check(it->second.legal == view.legal,
              "catalog: legal actions differ within an infoset");
      }
      ++it->second.visits;
      for (Action a : view.legal) {
        trail[p].emplace_back(key.key, a);
        actions.push_back(a);
        self(self);
        actions.pop_back();
        trail[p].pop_back();
      }
      return;
    }
    for (Action a : view.legal) {
      actions.push_back(a);
      self(self);
      actions.pop_back();
    }
  };
  rec(rec);
  return catalog;
}

TreeCounts CountTree(const Game& game, int64_t node_budget) {
  Catalog c = BuildCatalog(game, node_budget);
  TreeCounts counts;
  counts.histories = c.num_histories;
  counts.terminals = c.num_terminals;
  for (const auto& m : c.per_player) {
    counts.infosets_per_player.push_back(static_cast<int64_t>(m.size()));
  }
  return counts;
}

std::string PackTensor(std::span<const double> tensor) {
  std::string out(tensor.size(), '0');
  for (size_t i = 0; i < tensor.size(); ++i) {
    Check(tensor[i] == 0.0 || tensor[i] == 1.0, "pack: non-binary tensor");
    if (tensor[i] == 1.0) out[i] = '1';
  }
  return out;
}

std::vector<double> UnpackTensor(const std::string& packed) {
  std::vector<double> out(packed.size(), 0.0);
  for (size_t i = 0; i < packed.size(); ++i) {
    Check(packed[i] == '0' || packed[i] == '1', "unpack: bad character");
    if (packed[i] == '1') out[i] = 1.0;
  }
  return out;
}

std::vector<std::string> EnumerateStateTensors(const Game& game,
                                               int64_t node_budget) {
  std::set<std::string> states;
  ForEachHistory(
      game,
      [&](const History& h, const NodeView&) {
        states.insert(PackTensor(game.EncodeState(h.actions()).joint));
      },
      node_budget);
  return {states.begin(), states.end()};
}

uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace oef
