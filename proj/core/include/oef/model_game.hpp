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

#ifndef OEF_MODEL_GAME_HPP_
#define OEF_MODEL_GAME_HPP_

#include <atomic>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "oef/env_model.hpp"
#include "oef/game.hpp"
#include "oef/solvers.hpp"

namespace oef {

// A game interface over learned (or exact) dynamics: the same operation
// surface as game-core, but driven by state tensors instead of histories.
class ModelGame {
 public:
  struct Step {
    std::vector<double> next_state;
    std::vector<double> rewards;  // zero unless terminal
    bool terminal = false;
    std::vector<uint8_t> legal_mask;  // of next_state; empty bits if terminal
  };

  virtual ~ModelGame() = default;

  // Static game metadata (dims, encodings, ids); never used for dynamics
  // by the learned backend.
  const Game& meta() const { return *meta_; }

  const std::vector<double>& RootState() const { return root_state_; }
  const std::vector<uint8_t>& RootLegalMask() const { return root_mask_; }

  // One transition of the dynamics. `a` must be legal under the caller's
  // mask for `state`.
  virtual Step ApplyAction(const std::vector<double>& state, Action a) = 0;

  // Distribution over the set bits of `legal_mask` at a chance state,
  // full-width with zeros elsewhere.
  virtual std::vector<double> ChanceDistribution(
      const std::vector<double>& state,
      const std::vector<uint8_t>& legal_mask) = 0;

  int64_t StepCount() const { return steps_.load(); }
  int64_t DecodeFaults() const { return decode_faults_.load(); }
  double FaultRate() const {
    int64_t s = steps_.load();
    return s == 0 ? 0.0 : static_cast<double>(decode_faults_.load()) / s;
  }
  void ResetCounters() {
    steps_ = 0;
    decode_faults_ = 0;
  }
  // Depth-cap truncations count against the decode-fault budget.
  void NoteTruncation() { ++decode_faults_; }

 protected:
  explicit ModelGame(std::shared_ptr<const Game> meta)
      : meta_(std::move(meta)) {}

  std::shared_ptr<const Game> meta_;
  std::vector<double> root_state_;
  std::vector<uint8_t> root_mask_;
  std::atomic<int64_t> steps_{0};
  std::atomic<int64_t> decode_faults_{0};
};

// Exact dynamics: the true game behind the ModelGame surface. Used for
// perfect-model baselines of the offline solvers.
std::unique_ptr<ModelGame> MakePerfectModelGame(std::shared_ptr<const Game> game);

struct LearnedModelOptions {
  // Budget for caching reachable encodings from game metadata; the decode
  // fallback uses dataset states plus this cache. Set 0 to disable.
  int64_t enumeration_budget = 500000;
};

std::unique_ptr<ModelGame> MakeLearnedModelGame(std::shared_ptr<const Game> meta,
                                                EnvModel model,
                                                LearnedModelOptions options = {});

// Fraction of records the model reproduces exactly: decoded next state
// bit-for-bit, terminal flag and rewards (within 0.1), and the next legal
// mask.
struct FidelityReport {
  double next_state_match = 0;
  double terminal_reward_match = 0;
  double legal_mask_match = 0;
  int64_t count = 0;
};

FidelityReport EvaluateFidelity(ModelGame& model,
                                std::span<const TransitionRecord> records);

// Tree adapter over a ModelGame for the generic evaluation algorithms.
// Depth beyond `depth_cap` truncates to a zero-payoff terminal (counted as
// a decode fault); total expanded nodes above `node_budget` throw
// Error("model-blowup").
class ModelTree {
 public:
  ModelTree(ModelGame& model, int depth_cap, int64_t node_budget)
      : model_(&model), depth_cap_(depth_cap), node_budget_(node_budget) {}

  struct Node {
    std::vector<double> state;
    NodeView view;
    int depth = 0;
  };

  Node Root() const;
  Node Child(const Node& n, Action a) const;
  const NodeView& View(const Node& n) const { return n.view; }
  int NumPlayers() const { return model_->meta().NumPlayers(); }
  InfoSetKey Infoset(const Node& n, Player p) const;
  std::string NodeKey(const Node& n) const;
  ModelGame& model() const { return *model_; }

 private:
  NodeView MakeView(const std::vector<double>& state,
                    const std::vector<uint8_t>& mask, bool terminal,
                    const std::vector<double>& rewards) const;

  ModelGame* model_;
  int depth_cap_;
  int64_t node_budget_;
  mutable std::atomic<int64_t> nodes_{0};
};

}  // namespace oef

#endif  // OEF_MODEL_GAME_HPP_
