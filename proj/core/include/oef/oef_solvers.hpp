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

#ifndef OEF_OEF_SOLVERS_HPP_
#define OEF_OEF_SOLVERS_HPP_

#include <optional>

#include "oef/catalog.hpp"
#include "oef/meta_game.hpp"
#include "oef/model_game.hpp"
#include "oef/net.hpp"

namespace oef {

enum class BrOracleKind { kExactTree, kQLearning };

struct QLearnConfig {
  int64_t episodes = 20000;
  double learning_rate = 0.1;   // initial step size, decayed per visit
  double epsilon = 0.2;
  int64_t eval_episodes = 2000;
};

// Tabular Q-learning best response by rollouts on any tree (true game or
// model). Rewards are terminal-only and undiscounted; updates bootstrap
// off the max Q of the next own decision, so exploration noise does not
// bias the targets. `opponent_sampler` is invoked once per episode, which
// lets PSRO resample opponents from its meta-strategy every episode.
template <class Tree>
BestResponseResult QLearnBestResponse(
    const Tree& tree, const std::function<StrategyFn()>& opponent_sampler,
    Player br_player, const QLearnConfig& cfg, uint64_t seed) {
  std::map<std::string, std::vector<double>> q;
  std::map<std::string, std::vector<int64_t>> visits;
  Rng rng(DeriveSeed(seed, 0x91));

  auto run_episode = [&](bool learn) -> double {
    StrategyFn opponents = opponent_sampler();
    std::vector<std::pair<std::string, size_t>> own_path;
    typename Tree::Node node = tree.Root();
    while (true) {
      const NodeView& view = tree.View(node);
      if (view.IsTerminal()) {
        double payoff = view.payoffs[br_player];
        if (learn) {
          // Backward sweep: the last decision bootstraps the payoff, the
          // earlier ones the successor's max Q. Per-pair step-size decay
          // keeps late estimates stable against the payoff noise.
          double target = payoff;
          for (auto it = own_path.rbegin(); it != own_path.rend(); ++it) {
            std::vector<double>& values = q[it->first];
            int64_t n = ++visits[it->first][it->second];
            double step = cfg.learning_rate / (1.0 + 0.02 * (n - 1));
            values[it->second] += step * (target - values[it->second]);
            target = *std::max_element(values.begin(), values.end());
          }
        }
        return payoff;
      }
      Action chosen;
      if (view.IsChance()) {
        chosen = view.legal[rng.SampleIndex(view.chance_probs)];
      } else if (view.to_move != br_player) {
        std::vector<double> probs =
            opponents(tree.Infoset(node, view.to_move), view.legal);
        chosen = view.legal[rng.SampleIndex(probs)];
      } else {
        InfoSetKey key = tree.Infoset(node, br_player);
        auto [it, inserted] = q.try_emplace(key.key);
        if (inserted) {
          it->second.assign(view.legal.size(), 0.0);
          visits[key.key].assign(view.legal.size(), 0);
        }
        size_t idx = 0;
        if (learn && rng.Uniform() < cfg.epsilon) {
          idx = rng.UniformBelow(view.legal.size());
        } else {
          idx = std::max_element(it->second.begin(), it->second.end()) -
                it->second.begin();
        }
        if (learn) own_path.emplace_back(key.key, idx);
        chosen = view.legal[idx];
      }
      node = tree.Child(node, chosen);
    }
  };

  for (int64_t e = 0; e < cfg.episodes; ++e) run_episode(true);
  double value = 0;
  for (int64_t e = 0; e < cfg.eval_episodes; ++e) {
    value += run_episode(false);
  }

  BestResponseResult result;
  result.value = value / static_cast<double>(cfg.eval_episodes);
  result.policy.owner = br_player;
  for (const auto& [key, values] : q) {
    std::vector<double> probs(values.size(), 0.0);
    probs[std::max_element(values.begin(), values.end()) - values.begin()] = 1.0;
    result.policy.table[key] = std::move(probs);
  }
  return result;
}

template <class Tree>
BestResponseResult QLearnBestResponse(const Tree& tree,
                                      const StrategyFn& opponents,
                                      Player br_player, const QLearnConfig& cfg,
                                      uint64_t seed) {
  return QLearnBestResponse(
      tree, std::function<StrategyFn()>([&opponents] { return opponents; }),
      br_player, cfg, seed);
}

// ---------------------------------------------------------------------------
// OEF-PSRO
// ---------------------------------------------------------------------------

struct PsroConfig {
  int iterations = 25;
  std::optional<MetaSolverKind> meta_solver;  // default by player count
  BrOracleKind oracle = BrOracleKind::kExactTree;
  uint64_t seed = 1;
  double fault_cap = 0.05;
  int64_t node_budget = 4000000;
  int depth_cap_extra = 2;  // true max episode length + this
  QLearnConfig qlearn;
  bool eval_each_iteration = false;  // exact NashConv trace on eval_game
};

struct PsroIterationStats {
  int iteration = 0;
  MetaStrategy meta_used;  // meta-strategy the iteration sampled from
  std::vector<int> set_sizes;
  double nash_conv = std::numeric_limits<double>::quiet_NaN();
};

struct PsroResult {
  Profile policy;
  MetaGame meta_game;
  MetaStrategy final_meta;
  std::vector<PsroIterationStats> trace;
  double fault_rate = 0;
  int64_t model_steps = 0;
};

// Policy-set expansion on the model: sample opponents from the current
// meta-strategy, best-respond on the model, extend the meta-game, re-solve.
// `catalog` (when present) enables reach-weighted flattening of the final
// mixture over the true game's infosets and total tabulated output.
PsroResult OefPsro(ModelGame& model, const PsroConfig& cfg,
                   const Catalog* catalog, const Game* eval_game = nullptr);

// Realization-equivalent per-infoset flattening of a mixture over
// behavioral policies (falls back to the plain per-infoset mixture at
// infosets no component reaches).
Profile FlattenMixture(const std::vector<std::vector<Policy>>& policy_sets,
                       const MetaStrategy& meta, const Catalog& catalog);

MetaSolverKind DefaultMetaSolver(int num_players);

// ---------------------------------------------------------------------------
// OEF-CFR (sampling-based CFR with regret/strategy networks on the model)
// ---------------------------------------------------------------------------

// One sample in a regret or strategy memory: the infoset tensor, a
// full-action-width value vector (regrets or strategy probabilities, zeros
// off-mask), and the CFR iteration that produced it.
struct CfrMemoryEntry {
  std::vector<double> tensor;
  std::vector<double> values;
  std::vector<uint8_t> legal_mask;
  int64_t iteration = 1;
};

struct DeepCfrConfig {
  int iterations = 100;   // T
  int traversals = 200;   // K per player per iteration
  int hidden = 64;
  int regret_sgd_steps = 4000;     // per from-scratch retraining
  int strategy_sgd_steps = 10000;  // final average-strategy fit
  int batch_size = 64;
  double learning_rate = 0.02;
  uint64_t seed = 1;
  double fault_cap = 0.05;
  int64_t node_budget = 4000000;  // per (iteration, player) traversal batch
  int depth_cap_extra = 2;
  std::optional<size_t> reservoir_capacity;  // unbounded when unset
  bool capture_memories = false;  // copy memories into the result
};

struct DeepCfrResult {
  Profile policy;
  // Per retraining: the freshly-initialized and post-training parameter
  // hashes, in (iteration, player) order.
  std::vector<std::pair<uint64_t, uint64_t>> regret_net_hashes;
  std::vector<int64_t> regret_memory_sizes;
  std::vector<int64_t> strategy_memory_sizes;
  std::vector<std::vector<CfrMemoryEntry>> regret_memories;    // if captured
  std::vector<std::vector<CfrMemoryEntry>> strategy_memories;  // if captured
  std::vector<Net> strategy_nets;  // function-form policy for large games
  int64_t traverser_nodes = 0;       // decision nodes of the traverser
  int64_t traverser_expansions = 0;  // every traverser action branched
  int64_t sampled_expansions = 0;    // opponent/chance single samples
  double fault_rate = 0;
  int64_t model_steps = 0;
};

DeepCfrResult OefCfr(ModelGame& model, const DeepCfrConfig& cfg,
                     const Catalog& catalog);

}  // namespace oef

#endif  // OEF_OEF_SOLVERS_HPP_
