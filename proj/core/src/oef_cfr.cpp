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

using MemoryEntry = CfrMemoryEntry;

// Unbounded by default; reservoir sampling when a capacity is set.
class Memory {
 public:
  Memory(std::optional<size_t> capacity, uint64_t seed)
      : capacity_(capacity), rng_(DeriveSeed(seed, 0xC0)) {}

  void Insert(MemoryEntry entry) {
    ++inserted_;
    if (!capacity_.has_value() || entries_.size() < *capacity_) {
      entries_.push_back(std::move(entry));
      return;
    }
    uint64_t slot = rng_.UniformBelow(inserted_);
    if (slot < *capacity_) entries_[slot] = std::move(entry);
  }

  const std::vector<MemoryEntry>& entries() const { return entries_; }
  int64_t size() const { return static_cast<int64_t>(entries_.size()); }

 private:
  std::optional<size_t> capacity_;
  Rng rng_;
  uint64_t inserted_ = 0;
  std::vector<MemoryEntry> entries_;
};

// Regret-matching strategy over the legal subset of a regret net's output.
std::vector<double> NetRegretStrategy(const Net& net,
                                      std::span<const double> tensor,
                                      const std::vector<Action>& legal) {
  std::vector<double> predicted = net.Forward(tensor);
  std::vector<double> regrets;
  regrets.reserve(legal.size());
  for (Action a : legal) regrets.push_back(predicted[a]);
  return RegretMatching(regrets);
}

struct TraverseContext {
  const ModelTree* tree = nullptr;
  Player traverser = 0;
  const std::vector<Net>* regret_nets = nullptr;
  std::vector<Memory>* regret_memory = nullptr;
  std::vector<Memory>* strategy_memory = nullptr;
  int64_t iteration = 1;
  Rng* rng = nullptr;
  int max_actions = 0;
  int64_t* traverser_nodes = nullptr;
  int64_t* traverser_expansions = nullptr;
  int64_t* sampled_expansions = nullptr;
};

// External-sampling traversal on the model: the traverser branches every
// legal action; opponents and chance sample one. Regret samples go to the
// traverser's memory, play strategies to the opponents' strategy memory.
double Traverse(const TraverseContext& ctx, const ModelTree::Node& node) {
  const NodeView& view = ctx.tree->View(node);
  if (view.IsTerminal()) return view.payoffs[ctx.traverser];

  if (view.IsChance()) {
    ++*ctx.sampled_expansions;
    int idx = ctx.rng->SampleIndex(view.chance_probs);
    return Traverse(ctx, ctx.tree->Child(node, view.legal[idx]));
  }

  Player p = view.to_move;
  InfoSetKey key = ctx.tree->Infoset(node, p);
  std::vector<double> sigma =
      NetRegretStrategy((*ctx.regret_nets)[p], key.tensor, view.legal);

  if (p == ctx.traverser) {
    ++*ctx.traverser_nodes;
    *ctx.traverser_expansions += static_cast<int64_t>(view.legal.size());
    std::vector<double> action_values(view.legal.size());
    double value = 0;
    for (size_t i = 0; i < view.legal.size(); ++i) {
      action_values[i] = Traverse(ctx, ctx.tree->Child(node, view.legal[i]));
      value += sigma[i] * action_values[i];
    }
    MemoryEntry entry;
    entry.tensor = key.tensor;
    entry.values.assign(ctx.max_actions, 0.0);
    entry.legal_mask.assign(ctx.max_actions, 0);
    for (size_t i = 0; i < view.legal.size(); ++i) {
      entry.values[view.legal[i]] = action_values[i] - value;
      entry.legal_mask[view.legal[i]] = 1;
    }
    entry.iteration = ctx.iteration;
    (*ctx.regret_memory)[p].Insert(std::move(entry));
    return value;
  }

  // Opponent node: record the current strategy, then sample from it.
  MemoryEntry entry;
  entry.tensor = key.tensor;
  entry.values.assign(ctx.max_actions, 0.0);
  entry.legal_mask.assign(ctx.max_actions, 0);
  for (size_t i = 0; i < view.legal.size(); ++i) {
    entry.values[view.legal[i]] = sigma[i];
    entry.legal_mask[view.legal[i]] = 1;
  }
  entry.iteration = ctx.iteration;
  (*ctx.strategy_memory)[p].Insert(std::move(entry));

  ++*ctx.sampled_expansions;
  int idx = ctx.rng->SampleIndex(sigma);
  return Traverse(ctx, ctx.tree->Child(node, view.legal[idx]));
}

// Fits a net to memory entries with iteration-linear sample weights, using
// a fixed budget of SGD minibatch steps.
void FitToMemory(Net& net, const Memory& memory, LossKind loss, int sgd_steps,
                 int batch_size, double lr, uint64_t seed) {
  if (memory.entries().empty() || sgd_steps <= 0) return;
  const auto& entries = memory.entries();
  const int64_t n = static_cast<int64_t>(entries.size());
  const int in_dim = static_cast<int>(entries[0].tensor.size());
  const int out_dim = static_cast<int>(entries[0].values.size());

  Eigen::MatrixXd X(n, in_dim), T(n, out_dim), M(n, out_dim);
  Eigen::VectorXd W(n);
  for (int64_t r = 0; r < n; ++r) {
    for (int c = 0; c < in_dim; ++c) X(r, c) = entries[r].tensor[c];
    for (int c = 0; c < out_dim; ++c) {
      T(r, c) = entries[r].values[c];
      M(r, c) = entries[r].legal_mask[c] ? 1.0 : 0.0;
    }
    W[r] = static_cast<double>(entries[r].iteration);
  }
  BatchRef data{&X, &T, &W, loss == LossKind::kMse ? &M : nullptr};

  TrainConfig cfg;
  cfg.batch_size = batch_size;
  cfg.learning_rate = lr;
  Rng shuffle(DeriveSeed(seed, 0xC1));
  int64_t steps_per_epoch = (n + batch_size - 1) / batch_size;
  int64_t epochs = std::max<int64_t>(1, (sgd_steps + steps_per_epoch - 1) /
                                            steps_per_epoch);
  for (int64_t e = 0; e < epochs; ++e) {
    net.TrainEpoch(data, loss, cfg, shuffle);
  }
}

}  // namespace

DeepCfrResult OefCfr(ModelGame& model, const DeepCfrConfig& cfg,
                     const Catalog& catalog) {
  const Game& meta = model.meta();
  const int num_players = meta.NumPlayers();
  const int in_dim = meta.Dims().per_player;
  const int out_dim = meta.MaxActions();
  const int depth_cap = meta.MaxEpisodeLength() + cfg.depth_cap_extra;
  model.ResetCounters();

  DeepCfrResult result;
  std::vector<Net> regret_nets;
  std::vector<Memory> regret_memory, strategy_memory;
  for (Player p = 0; p < num_players; ++p) {
    regret_nets.emplace_back(std::vector<int>{in_dim, cfg.hidden, out_dim},
                             HeadKind::kLinear, DeriveSeed(cfg.seed, 0xD000 + p));
    regret_memory.emplace_back(cfg.reservoir_capacity,
                               DeriveSeed(cfg.seed, 0xD100 + p));
    strategy_memory.emplace_back(cfg.reservoir_capacity,
                                 DeriveSeed(cfg.seed, 0xD200 + p));
  }

  Rng sample_rng(DeriveSeed(cfg.seed, 0xD300));
  for (int64_t t = 1; t <= cfg.iterations; ++t) {
    for (Player p = 0; p < num_players; ++p) {
      ModelTree tree(model, depth_cap, cfg.node_budget);
      TraverseContext ctx;
      ctx.tree = &tree;
      ctx.traverser = p;
      ctx.regret_nets = &regret_nets;
      ctx.regret_memory = &regret_memory;
      ctx.strategy_memory = &strategy_memory;
      ctx.iteration = t;
      ctx.rng = &sample_rng;
      ctx.max_actions = out_dim;
      ctx.traverser_nodes = &result.traverser_nodes;
      ctx.traverser_expansions = &result.traverser_expansions;
      ctx.sampled_expansions = &result.sampled_expansions;
      for (int k = 0; k < cfg.traversals; ++k) {
        Traverse(ctx, tree.Root());
      }

      // Regret net retrained from scratch on the grown memory.
      Net fresh(std::vector<int>{in_dim, cfg.hidden, out_dim}, HeadKind::kLinear,
                DeriveSeed(cfg.seed, 0xD400 + t * 64 + p));
      uint64_t init_hash = fresh.ParamHash();
      FitToMemory(fresh, regret_memory[p], LossKind::kMse, cfg.regret_sgd_steps,
                  cfg.batch_size, cfg.learning_rate,
                  DeriveSeed(cfg.seed, 0xD500 + t * 64 + p));
      result.regret_net_hashes.emplace_back(init_hash, fresh.ParamHash());
      regret_nets[p] = std::move(fresh);
    }
    if (model.FaultRate() > cfg.fault_cap) {
      Fatal("decode-fault: rate " + std::to_string(model.FaultRate()) +
            " above cap " + std::to_string(cfg.fault_cap));
    }
  }

  // Average-strategy nets from the opponents' recorded play.
  result.policy = UniformProfile(num_players);
  for (Player p = 0; p < num_players; ++p) {
    Net strategy_net(std::vector<int>{in_dim, cfg.hidden, out_dim},
                     HeadKind::kSoftmax, DeriveSeed(cfg.seed, 0xD600 + p));
    FitToMemory(strategy_net, strategy_memory[p], LossKind::kCrossEntropy,
                cfg.strategy_sgd_steps, cfg.batch_size, cfg.learning_rate,
                DeriveSeed(cfg.seed, 0xD700 + p));

    result.strategy_nets.push_back(strategy_net);
    for (const auto& [key, info] : catalog.per_player[p]) {
      std::vector<double> logits_in = strategy_net.Forward(info.tensor);
      // The softmax head already produced probabilities; mask and
      // renormalize over the legal set.
      std::vector<double> probs;
      probs.reserve(info.legal.size());
      double total = 0;
      for (Action a : info.legal) total += logits_in[a];
      for (Action a : info.legal) {
        probs.push_back(total > 0 ? logits_in[a] / total
                                  : 1.0 / info.legal.size());
      }
      result.policy[p].table[key] = std::move(probs);
    }
    ValidatePolicy(result.policy[p]);
    result.regret_memory_sizes.push_back(regret_memory[p].size());
    result.strategy_memory_sizes.push_back(strategy_memory[p].size());
    if (cfg.capture_memories) {
      result.regret_memories.push_back(regret_memory[p].entries());
      result.strategy_memories.push_back(strategy_memory[p].entries());
    }
  }

  result.fault_rate = model.FaultRate();
  result.model_steps = model.StepCount();
  return result;
}

}  // namespace oef
