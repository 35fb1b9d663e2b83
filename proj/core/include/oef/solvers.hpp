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

#ifndef OEF_SOLVERS_HPP_
#define OEF_SOLVERS_HPP_

#include <algorithm>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "oef/game.hpp"
#include "oef/policy.hpp"
#include "oef/rng.hpp"

namespace oef {

// Regret matching: positive-regret proportional, uniform when no regret is
// positive.
std::vector<double> RegretMatching(std::span<const double> regrets);

// Cumulative regrets and average-strategy numerators per infoset.
struct RegretTable {
  struct Entry {
    std::vector<Action> legal;
    std::vector<double> regret;
    std::vector<double> strategy;
  };
  std::vector<std::map<std::string, Entry>> players;
  int64_t iteration = 0;

  explicit RegretTable(int num_players = 0) : players(num_players) {}

  Entry& GetOrCreate(Player p, const std::string& key,
                     const std::vector<Action>& legal) {
    auto [it, inserted] = players[p].try_emplace(key);
    if (inserted) {
      it->second.legal = legal;
      it->second.regret.assign(legal.size(), 0.0);
      it->second.strategy.assign(legal.size(), 0.0);
    }
    return it->second;
  }
};

// One vanilla-CFR iteration: a full tree sweep for each player in order,
// accumulating counterfactual regrets and own-reach-weighted strategies.
void CfrIteration(const Game& game, RegretTable& table);

// Average strategy profile from accumulated strategy sums (uniform where a
// sum is all-zero or the infoset was never visited).
Profile AveragePolicy(const RegretTable& table);

// Strategy profile regret matching would play right now.
Profile CurrentPolicy(const RegretTable& table);

// Runs CfrIteration until `iterations` or until NashConv (checked every
// `check_every`, 0 = never) drops below `target`; returns iterations run.
int64_t RunCfr(const Game& game, RegretTable& table, int64_t iterations,
               double target_nash_conv = 0.0, int64_t check_every = 0);

// Logger invoked for every environment interaction of a sampling run.
using StepLogger = std::function<void(const History& parent, const NodeView& pv,
                                      Action a, const History& child,
                                      const NodeView& cv)>;

// One external-sampling MCCFR traversal for `traverser`: traverser actions
// fully branched, opponent and chance actions sampled once; updates
// traverser regrets with u(a) - u_sigma and opponents' strategy sums with
// their sampled strategies. Returns the traverser's sampled value.
double ExternalSamplingTraverse(const Game& game, Player traverser,
                                RegretTable& table, Rng& rng,
                                const StepLogger* logger = nullptr);

// ---------------------------------------------------------------------------
// Tree-generic evaluation. A Tree provides:
//   struct Node;  Node Root() const;  Node Child(const Node&, Action) const;
//   const NodeView& View(const Node&) const;  int NumPlayers() const;
//   InfoSetKey Infoset(const Node&, Player) const;
//   std::string NodeKey(const Node&) const;   // stable identity for memos
// ---------------------------------------------------------------------------

// Adapter exposing a Game as a Tree.
class TrueTree {
 public:
  explicit TrueTree(const Game& game) : game_(&game) {}

  struct Node {
    std::vector<Action> actions;
    NodeView view;
  };

  Node Root() const { return {{}, game_->Analyze({})}; }
  Node Child(const Node& n, Action a) const {
    Node child;
    child.actions = n.actions;
    child.actions.push_back(a);
    child.view = game_->Analyze(child.actions);
    return child;
  }
  const NodeView& View(const Node& n) const { return n.view; }
  int NumPlayers() const { return game_->NumPlayers(); }
  InfoSetKey Infoset(const Node& n, Player p) const {
    return game_->Infoset(n.actions, p);
  }
  std::string NodeKey(const Node& n) const {
    std::string key(n.actions.size() * sizeof(Action), '\0');
    std::memcpy(key.data(), n.actions.data(), key.size());
    return key;
  }
  const Game& game() const { return *game_; }

 private:
  const Game* game_;
};

template <class Tree>
std::vector<double> ExpectedUtilities(const Tree& tree,
                                      const StrategyFn& strategy) {
  std::vector<double> totals(tree.NumPlayers(), 0.0);
  auto rec = [&](auto&& self, const typename Tree::Node& node,
                 double reach) -> void {
    const NodeView& view = tree.View(node);
    if (view.IsTerminal()) {
      for (size_t i = 0; i < totals.size(); ++i) {
        totals[i] += reach * view.payoffs[i];
      }
      return;
    }
    if (view.IsChance()) {
      for (size_t i = 0; i < view.legal.size(); ++i) {
        if (view.chance_probs[i] > 0) {
          self(self, tree.Child(node, view.legal[i]),
               reach * view.chance_probs[i]);
        }
      }
      return;
    }
    std::vector<double> probs =
        strategy(tree.Infoset(node, view.to_move), view.legal);
    for (size_t i = 0; i < view.legal.size(); ++i) {
      if (probs[i] > 0) {
        self(self, tree.Child(node, view.legal[i]), reach * probs[i]);
      }
    }
  };
  rec(rec, tree.Root(), 1.0);
  return totals;
}

struct BestResponseResult {
  double value = 0;
  Policy policy;  // pure best response at every decision infoset
};

// Exact best response for `br_player` against `strategy` for everyone
// else: reach-weighted bottom-up maximization over the player's infosets.
template <class Tree>
BestResponseResult BestResponse(const Tree& tree, const StrategyFn& strategy,
                                Player br_player) {
  struct Bucket {
    std::vector<Action> legal;
    std::vector<std::pair<typename Tree::Node, double>> histories;
  };
  std::map<std::string, Bucket> buckets;

  // Pass 1: group the responder's decision histories by infoset, weighted
  // by everyone else's reach. The responder's own actions branch freely.
  auto collect = [&](auto&& self, const typename Tree::Node& node,
                     double opp_reach) -> void {
    const NodeView& view = tree.View(node);
    if (view.IsTerminal()) return;
    if (view.IsChance()) {
      for (size_t i = 0; i < view.legal.size(); ++i) {
        if (view.chance_probs[i] > 0) {
          self(self, tree.Child(node, view.legal[i]),
               opp_reach * view.chance_probs[i]);
        }
      }
      return;
    }
    if (view.to_move == br_player) {
      InfoSetKey key = tree.Infoset(node, br_player);
      Bucket& bucket = buckets[key.key];
      if (bucket.legal.empty()) bucket.legal = view.legal;
      bucket.histories.emplace_back(node, opp_reach);
      for (Action a : view.legal) self(self, tree.Child(node, a), opp_reach);
      return;
    }
    std::vector<double> probs =
        strategy(tree.Infoset(node, view.to_move), view.legal);
    for (size_t i = 0; i < view.legal.size(); ++i) {
      if (probs[i] > 0) {
        self(self, tree.Child(node, view.legal[i]), opp_reach * probs[i]);
      }
    }
  };
  collect(collect, tree.Root(), 1.0);

  // Pass 2: lazily resolve best actions; values memoized per node. True
  // games have perfect recall, so the infoset dependency chain is acyclic;
  // learned-model trees can violate recall (a predicted state may repeat
  // an ancestor's infoset), so re-entered infosets resolve provisionally
  // to their first legal action to keep the resolution well-founded.
  std::unordered_map<std::string, double> value_memo;
  std::map<std::string, size_t> best;  // infoset key -> index into legal
  std::set<std::string> in_progress;

  auto best_at = [&](auto&& self, const std::string& key) -> size_t {
    auto found = best.find(key);
    if (found != best.end()) return found->second;
    if (!in_progress.insert(key).second) return 0;

    auto value = [&](auto&& vself, const typename Tree::Node& node) -> double {
      const NodeView& view = tree.View(node);
      if (view.IsTerminal()) return view.payoffs[br_player];
      std::string node_key = tree.NodeKey(node);
      auto memo = value_memo.find(node_key);
      if (memo != value_memo.end()) return memo->second;
      double v = 0;
      if (view.IsChance()) {
        for (size_t i = 0; i < view.legal.size(); ++i) {
          if (view.chance_probs[i] > 0) {
            v += view.chance_probs[i] *
                 vself(vself, tree.Child(node, view.legal[i]));
          }
        }
      } else if (view.to_move == br_player) {
        InfoSetKey k = tree.Infoset(node, br_player);
        size_t idx = self(self, k.key);
        v = vself(vself, tree.Child(node, view.legal[idx]));
      } else {
        std::vector<double> probs =
            strategy(tree.Infoset(node, view.to_move), view.legal);
        for (size_t i = 0; i < view.legal.size(); ++i) {
          if (probs[i] > 0) {
            v += probs[i] * vself(vself, tree.Child(node, view.legal[i]));
          }
        }
      }
      value_memo.emplace(std::move(node_key), v);
      return v;
    };

    const Bucket& bucket = buckets.at(key);
    size_t best_idx = 0;
    double best_q = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < bucket.legal.size(); ++i) {
      double q = 0;
      for (const auto& [node, weight] : bucket.histories) {
        if (weight > 0) {
          q += weight * value(value, tree.Child(node, bucket.legal[i]));
        }
      }
      if (q > best_q + 1e-15) {
        best_q = q;
        best_idx = i;
      }
    }
    best[key] = best_idx;
    in_progress.erase(key);
    return best_idx;
  };

  for (const auto& [key, bucket] : buckets) best_at(best_at, key);

  BestResponseResult result;
  result.policy.owner = br_player;
  for (const auto& [key, bucket] : buckets) {
    std::vector<double> probs(bucket.legal.size(), 0.0);
    probs[best[key]] = 1.0;
    result.policy.table[key] = std::move(probs);
  }

  // Root value under the best response.
  auto root_value = [&](auto&& self, const typename Tree::Node& node) -> double {
    const NodeView& view = tree.View(node);
    if (view.IsTerminal()) return view.payoffs[br_player];
    if (view.IsChance()) {
      double v = 0;
      for (size_t i = 0; i < view.legal.size(); ++i) {
        if (view.chance_probs[i] > 0) {
          v += view.chance_probs[i] * self(self, tree.Child(node, view.legal[i]));
        }
      }
      return v;
    }
    InfoSetKey key = tree.Infoset(node, view.to_move);
    if (view.to_move == br_player) {
      size_t idx = best.at(key.key);
      return self(self, tree.Child(node, view.legal[idx]));
    }
    std::vector<double> probs = strategy(key, view.legal);
    double v = 0;
    for (size_t i = 0; i < view.legal.size(); ++i) {
      if (probs[i] > 0) v += probs[i] * self(self, tree.Child(node, view.legal[i]));
    }
    return v;
  };
  result.value = root_value(root_value, tree.Root());
  return result;
}

struct NashConvResult {
  double nash_conv = 0;
  std::vector<double> per_player;       // BR value minus profile value
  std::vector<double> profile_values;   // expected utilities of the profile
  std::vector<double> br_values;
};

template <class Tree>
NashConvResult NashConvOf(const Tree& tree, const StrategyFn& strategy) {
  NashConvResult result;
  result.profile_values = ExpectedUtilities(tree, strategy);
  for (Player p = 0; p < tree.NumPlayers(); ++p) {
    result.br_values.push_back(BestResponse(tree, strategy, p).value);
    double gap = result.br_values[p] - result.profile_values[p];
    if (std::abs(gap) <= 1e-9) gap = std::max(gap, 0.0);
    result.per_player.push_back(gap);
    result.nash_conv += gap;
  }
  if (std::abs(result.nash_conv) <= 1e-9) {
    result.nash_conv = std::max(result.nash_conv, 0.0);
  }
  return result;
}

// Convenience wrappers on the true game.
std::vector<double> ExpectedUtilities(const Game& game, const Profile& profile);
double BestResponseValue(const Game& game, const Profile& fixed, Player br_player);
NashConvResult NashConv(const Game& game, const Profile& profile);

}  // namespace oef

#endif  // OEF_SOLVERS_HPP_
