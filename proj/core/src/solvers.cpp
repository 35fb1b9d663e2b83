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

#include "oef/solvers.hpp"

#include <cmath>
#include <cstring>

namespace oef {

std::vector<double> RegretMatching(std::span<const double> regrets) {
  Check(!regrets.empty(), "regret-matching: empty regret vector");
  double positive_total = 0;
  for (double r : regrets) positive_total += std::max(r, 0.0);
  std::vector<double> probs(regrets.size());
  if (positive_total > 0) {
    for (size_t i = 0; i < regrets.size(); ++i) {
      probs[i] = std::max(regrets[i], 0.0) / positive_total;
    }
  } else {
    std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(regrets.size()));
  }
  return probs;
}

namespace {

// Strategies are frozen per sweep: regret matching is evaluated once per
// infoset and cached so that in-sweep regret updates cannot leak into
// sigma^t at a later history of the same infoset.
using SigmaCache = std::unordered_map<const RegretTable::Entry*, std::vector<double>>;

const std::vector<double>& SweepSigma(const RegretTable::Entry& entry,
                                      SigmaCache& cache) {
  auto [it, inserted] = cache.try_emplace(&entry);
  if (inserted) it->second = RegretMatching(entry.regret);
  return it->second;
}

// One sweep of vanilla CFR for `traverser`. Returns the traverser's
// counterfactual value of the subtree.
double CfrSweep(const Game& game, std::vector<Action>& actions,
                Player traverser, double reach_self, double reach_others,
                RegretTable& table, SigmaCache& cache) {
  NodeView view = game.Analyze(actions);
  if (view.IsTerminal()) return view.payoffs[traverser];
  if (view.IsChance()) {
    double v = 0;
    for (size_t i = 0; i < view.legal.size(); ++i) {
      actions.push_back(view.legal[i]);
      v += view.chance_probs[i] *
           CfrSweep(game, actions, traverser, reach_self,
                    reach_others * view.chance_probs[i], table, cache);
      actions.pop_back();
    }
    return v;
  }
  Player p = view.to_move;
  InfoSetKey key = game.Infoset(actions, p);
  RegretTable::Entry& entry = table.GetOrCreate(p, key.key, view.legal);
  const std::vector<double>& sigma = SweepSigma(entry, cache);
  if (p != traverser) {
    double v = 0;
    for (size_t i = 0; i < view.legal.size(); ++i) {
      actions.push_back(view.legal[i]);
      v += sigma[i] * CfrSweep(game, actions, traverser, reach_self,
                               reach_others * sigma[i], table, cache);
      actions.pop_back();
    }
    return v;
  }
  std::vector<double> action_values(view.legal.size());
  double v = 0;
  for (size_t i = 0; i < view.legal.size(); ++i) {
    actions.push_back(view.legal[i]);
    action_values[i] = CfrSweep(game, actions, traverser, reach_self * sigma[i],
                                reach_others, table, cache);
    actions.pop_back();
    v += sigma[i] * action_values[i];
  }
  for (size_t i = 0; i < view.legal.size(); ++i) {
    entry.regret[i] += reach_others * (action_values[i] - v);
    entry.strategy[i] += reach_self * sigma[i];
  }
  return v;
}

}  // namespace

void CfrIteration(const Game& game, RegretTable& table) {
  if (table.players.empty()) table.players.resize(game.NumPlayers());
  std::vector<Action> actions;
  for (Player p = 0; p < game.NumPlayers(); ++p) {
    SigmaCache cache;
    CfrSweep(game, actions, p, 1.0, 1.0, table, cache);
  }
  ++table.iteration;
}

Profile AveragePolicy(const RegretTable& table) {
  Profile profile;
  for (Player p = 0; p < static_cast<int>(table.players.size()); ++p) {
    Policy policy;
    policy.owner = p;
    for (const auto& [key, entry] : table.players[p]) {
      double total = 0;
      for (double s : entry.strategy) total += s;
      std::vector<double> probs(entry.strategy.size());
      if (total > 0) {
        for (size_t i = 0; i < probs.size(); ++i) probs[i] = entry.strategy[i] / total;
      } else {
        std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(probs.size()));
      }
      policy.table[key] = std::move(probs);
    }
    profile.push_back(std::move(policy));
  }
  return profile;
}

Profile CurrentPolicy(const RegretTable& table) {
  Profile profile;
  for (Player p = 0; p < static_cast<int>(table.players.size()); ++p) {
    Policy policy;
    policy.owner = p;
    for (const auto& [key, entry] : table.players[p]) {
      policy.table[key] = RegretMatching(entry.regret);
    }
    profile.push_back(std::move(policy));
  }
  return profile;
}

int64_t RunCfr(const Game& game, RegretTable& table, int64_t iterations,
               double target_nash_conv, int64_t check_every) {
  if (table.players.empty()) table.players.resize(game.NumPlayers());
  for (int64_t t = 1; t <= iterations; ++t) {
    CfrIteration(game, table);
    if (target_nash_conv > 0 && check_every > 0 && t % check_every == 0) {
      if (NashConv(game, AveragePolicy(table)).nash_conv < target_nash_conv) {
        return t;
      }
    }
  }
  return iterations;
}

namespace {

double EsTraverse(const Game& game, std::vector<Action>& actions,
                  Player traverser, RegretTable& table, Rng& rng,
                  const StepLogger* logger) {
  NodeView view = game.Analyze(actions);
  if (view.IsTerminal()) return view.payoffs[traverser];

  auto descend = [&](Action a, const NodeView& parent_view) -> double {
    if (logger != nullptr) {
      History parent(&game, actions);
      actions.push_back(a);
      (*logger)(parent, parent_view, a, History(&game, actions),
                game.Analyze(actions));
    } else {
      actions.push_back(a);
    }
    double v = EsTraverse(game, actions, traverser, table, rng, logger);
    actions.pop_back();
    return v;
  };

  if (view.IsChance()) {
    int idx = rng.SampleIndex(view.chance_probs);
    return descend(view.legal[idx], view);
  }
  Player p = view.to_move;
  InfoSetKey key = game.Infoset(actions, p);
  RegretTable::Entry& entry = table.GetOrCreate(p, key.key, view.legal);
  std::vector<double> sigma = RegretMatching(entry.regret);
  if (p == traverser) {
    std::vector<double> action_values(view.legal.size());
    double v = 0;
    for (size_t i = 0; i < view.legal.size(); ++i) {
      action_values[i] = descend(view.legal[i], view);
      v += sigma[i] * action_values[i];
    }
    for (size_t i = 0; i < view.legal.size(); ++i) {
      entry.regret[i] += action_values[i] - v;
    }
    return v;
  }
  for (size_t i = 0; i < sigma.size(); ++i) entry.strategy[i] += sigma[i];
  int idx = rng.SampleIndex(sigma);
  return descend(view.legal[idx], view);
}

}  // namespace

double ExternalSamplingTraverse(const Game& game, Player traverser,
                                RegretTable& table, Rng& rng,
                                const StepLogger* logger) {
  if (table.players.empty()) table.players.resize(game.NumPlayers());
  std::vector<Action> actions;
  return EsTraverse(game, actions, traverser, table, rng, logger);
}

std::vector<double> ExpectedUtilities(const Game& game, const Profile& profile) {
  return ExpectedUtilities(TrueTree(game), ProfileStrategy(profile));
}

double BestResponseValue(const Game& game, const Profile& fixed,
                         Player br_player) {
  return BestResponse(TrueTree(game), ProfileStrategy(fixed), br_player).value;
}

NashConvResult NashConv(const Game& game, const Profile& profile) {
  return NashConvOf(TrueTree(game), ProfileStrategy(profile));
}

}  // namespace oef
