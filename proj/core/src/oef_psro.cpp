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

#include <cmath>

#include "oef/oef_solvers.hpp"

namespace oef {

namespace {

// Strategy callback for a fixed assignment of one policy per player.
StrategyFn AssignmentStrategy(const std::vector<std::vector<Policy>>& sets,
                              const std::vector<int>& picks) {
  return [&sets, picks](const InfoSetKey& key,
                        const std::vector<Action>& legal) -> std::vector<double> {
    if (key.player >= 0 && key.player < static_cast<int>(picks.size())) {
      return sets[key.player][picks[key.player]].ProbsOrUniform(key.key,
                                                                legal.size());
    }
    return std::vector<double>(legal.size(), 1.0 / legal.size());
  };
}

void CheckFaultCap(const ModelGame& model, double cap) {
  if (model.FaultRate() > cap) {
    Fatal("decode-fault: rate " + std::to_string(model.FaultRate()) +
          " above cap " + std::to_string(cap));
  }
}

}  // namespace

MetaSolverKind DefaultMetaSolver(int num_players) {
  return num_players == 2 ? MetaSolverKind::kMatrixNash2p0s
                          : MetaSolverKind::kAlphaRank;
}

Profile FlattenMixture(const std::vector<std::vector<Policy>>& policy_sets,
                       const MetaStrategy& meta, const Catalog& catalog) {
  const int num_players = static_cast<int>(policy_sets.size());
  Profile out = UniformProfile(num_players);

  for (Player p = 0; p < num_players; ++p) {
    const auto& components = policy_sets[p];
    const auto& weights = meta[p];

    // Own-reach of each component at each infoset, by walking the unique
    // own-action chain recorded in the catalog (parents precede children
    // in key order only by construction of the chain, so compute lazily).
    std::map<std::string, std::vector<double>> reach;
    auto reach_of = [&](auto&& self, const std::string& key)
        -> const std::vector<double>& {
      auto found = reach.find(key);
      if (found != reach.end()) return found->second;
      const InfosetInfo& info = catalog.per_player[p].at(key);
      std::vector<double> r(components.size(), 1.0);
      if (!info.parent_key.empty()) {
        const std::vector<double>& parent_reach = self(self, info.parent_key);
        const InfosetInfo& parent = catalog.per_player[p].at(info.parent_key);
        size_t idx =
            std::find(parent.legal.begin(), parent.legal.end(),
                      info.parent_action) -
            parent.legal.begin();
        for (size_t k = 0; k < components.size(); ++k) {
          std::vector<double> probs =
              components[k].ProbsOrUniform(info.parent_key, parent.legal.size());
          r[k] = parent_reach[k] * probs[idx];
        }
      }
      return reach.emplace(key, std::move(r)).first->second;
    };

    for (const auto& [key, info] : catalog.per_player[p]) {
      const std::vector<double>& r = reach_of(reach_of, key);
      std::vector<double> mixed(info.legal.size(), 0.0);
      double total_weight = 0;
      for (size_t k = 0; k < components.size(); ++k) {
        total_weight += weights[k] * r[k];
      }
      if (total_weight > 0) {
        for (size_t k = 0; k < components.size(); ++k) {
          double w = weights[k] * r[k] / total_weight;
          if (w == 0) continue;
          std::vector<double> probs =
              components[k].ProbsOrUniform(key, info.legal.size());
          for (size_t i = 0; i < mixed.size(); ++i) mixed[i] += w * probs[i];
        }
      } else {
        // Unreached under every component: plain mixture.
        for (size_t k = 0; k < components.size(); ++k) {
          if (weights[k] == 0) continue;
          std::vector<double> probs =
              components[k].ProbsOrUniform(key, info.legal.size());
          for (size_t i = 0; i < mixed.size(); ++i) {
            mixed[i] += weights[k] * probs[i];
          }
        }
      }
      // Numerical cleanup.
      double sum = 0;
      for (double x : mixed) sum += x;
      for (double& x : mixed) x /= sum;
      out[p].table[key] = std::move(mixed);
    }
    ValidatePolicy(out[p]);
  }
  return out;
}

PsroResult OefPsro(ModelGame& model, const PsroConfig& cfg,
                   const Catalog* catalog, const Game* eval_game) {
  const int num_players = model.meta().NumPlayers();
  const int depth_cap = model.meta().MaxEpisodeLength() + cfg.depth_cap_extra;
  MetaSolverKind solver = cfg.meta_solver.value_or(DefaultMetaSolver(num_players));
  Rng rng(DeriveSeed(cfg.seed, 0x9500));
  model.ResetCounters();

  PsroResult result;
  MetaGame& meta = result.meta_game;
  meta.policies.assign(num_players, {});
  for (Player p = 0; p < num_players; ++p) {
    Policy uniform;
    uniform.owner = p;  // empty table: uniform everywhere
    meta.policies[p].push_back(std::move(uniform));
  }

  auto evaluate_profile = [&](const std::vector<int>& picks) {
    ModelTree tree(model, depth_cap, cfg.node_budget);
    return ExpectedUtilities(tree, AssignmentStrategy(meta.policies, picks));
  };
  auto fill_missing = [&] {
    for (const std::vector<int>& profile : AllProfiles(meta.Shape())) {
      if (!meta.utilities.count(profile)) {
        meta.utilities.emplace(profile, evaluate_profile(profile));
      }
    }
  };

  fill_missing();
  MetaStrategy sigma = MetaSolve(meta, solver);

  for (int iteration = 1; iteration <= cfg.iterations; ++iteration) {
    PsroIterationStats stats;
    stats.iteration = iteration;
    stats.meta_used = sigma;

    // One new best-response policy per player against opponents drawn from
    // the meta-strategy. The training loop of the oracle resamples
    // pi_{-i} ~ sigma_{-i} every episode; for the exact oracle that
    // distribution over opponent profiles is answered in closed form by
    // best-responding to its realization-equivalent flattened mixture.
    std::vector<Policy> additions;
    additions.reserve(num_players);
    std::optional<Profile> flattened;
    if (catalog != nullptr) {
      flattened = FlattenMixture(meta.policies, sigma, *catalog);
    }
    for (Player p = 0; p < num_players; ++p) {
      ModelTree tree(model, depth_cap, cfg.node_budget);
      BestResponseResult br;
      if (cfg.oracle == BrOracleKind::kExactTree && flattened.has_value()) {
        br = BestResponse(tree, ProfileStrategy(*flattened), p);
      } else if (cfg.oracle == BrOracleKind::kExactTree) {
        // No catalog to flatten over: respond to one sampled profile.
        std::vector<int> picks(num_players, 0);
        for (Player q = 0; q < num_players; ++q) {
          if (q != p) picks[q] = rng.SampleIndex(sigma[q]);
        }
        br = BestResponse(tree, AssignmentStrategy(meta.policies, picks), p);
      } else {
        Rng pick_rng(DeriveSeed(cfg.seed, 0x9700 + iteration * 16 + p));
        auto sampler = [&]() -> StrategyFn {
          std::vector<int> picks(num_players, 0);
          for (Player q = 0; q < num_players; ++q) {
            if (q != p) picks[q] = pick_rng.SampleIndex(sigma[q]);
          }
          return AssignmentStrategy(meta.policies, picks);
        };
        br = QLearnBestResponse(tree, std::function<StrategyFn()>(sampler), p,
                                cfg.qlearn,
                                DeriveSeed(cfg.seed, 0x9600 + iteration * 16 + p));
      }
      br.policy.owner = p;
      additions.push_back(std::move(br.policy));
    }
    for (Player p = 0; p < num_players; ++p) {
      meta.policies[p].push_back(std::move(additions[p]));
    }

    fill_missing();
    sigma = MetaSolve(meta, solver);
    CheckFaultCap(model, cfg.fault_cap);

    stats.set_sizes.clear();
    for (int s : meta.Shape()) stats.set_sizes.push_back(s);
    if (cfg.eval_each_iteration && eval_game != nullptr && catalog != nullptr) {
      Profile flattened = FlattenMixture(meta.policies, sigma, *catalog);
      stats.nash_conv = NashConv(*eval_game, flattened).nash_conv;
    }
    result.trace.push_back(std::move(stats));
  }

  result.final_meta = sigma;
  if (catalog != nullptr) {
    result.policy = FlattenMixture(meta.policies, sigma, *catalog);
  } else {
    // No catalog (unenumerable game): plain per-infoset mixture over the
    // keys the components visited.
    result.policy = UniformProfile(num_players);
    for (Player p = 0; p < num_players; ++p) {
      std::map<std::string, size_t> arity;
      for (const Policy& component : meta.policies[p]) {
        for (const auto& [key, probs] : component.table) {
          arity.try_emplace(key, probs.size());
        }
      }
      for (const auto& [key, size] : arity) {
        std::vector<double> mixed(size, 0.0);
        for (size_t k = 0; k < meta.policies[p].size(); ++k) {
          std::vector<double> probs =
              meta.policies[p][k].ProbsOrUniform(key, size);
          for (size_t i = 0; i < size; ++i) mixed[i] += sigma[p][k] * probs[i];
        }
        result.policy[p].table[key] = std::move(mixed);
      }
    }
  }
  result.fault_rate = model.FaultRate();
  result.model_steps = model.StepCount();
  return result;
}

}  // namespace oef
