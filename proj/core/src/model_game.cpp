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

#include "oef/model_game.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "oef/catalog.hpp"
#include "oef/dataset.hpp"

namespace oef {

namespace {

class PerfectModelGame final : public ModelGame {
 public:
  explicit PerfectModelGame(std::shared_ptr<const Game> game)
      : ModelGame(std::move(game)) {
    root_state_ = meta_->EncodeState({}).joint;
    root_mask_ = MaskFromLegal(meta_->Root().LegalActions(), meta_->MaxActions());
    histories_.emplace(PackTensor(root_state_), std::vector<Action>{});
  }

  Step ApplyAction(const std::vector<double>& state, Action a) override {
    ++steps_;
    std::vector<Action> actions = HistoryOf(state);
    actions.push_back(a);
    NodeView view = meta_->Analyze(actions);
    Step step;
    step.next_state = meta_->EncodeState(actions).joint;
    step.terminal = view.IsTerminal();
    step.rewards = step.terminal ? view.payoffs
                                 : std::vector<double>(meta_->NumPlayers(), 0.0);
    step.legal_mask = step.terminal
                          ? std::vector<uint8_t>(meta_->MaxActions(), 0)
                          : MaskFromLegal(view.legal, meta_->MaxActions());
    {
      std::lock_guard<std::mutex> lock(mu_);
      histories_.emplace(PackTensor(step.next_state), actions);
    }
    return step;
  }

  std::vector<double> ChanceDistribution(
      const std::vector<double>& state,
      const std::vector<uint8_t>& legal_mask) override {
    std::vector<Action> actions = HistoryOf(state);
    NodeView view = meta_->Analyze(actions);
    Check(view.IsChance(), "model: not a chance state");
    std::vector<double> probs(legal_mask.size(), 0.0);
    for (size_t i = 0; i < view.legal.size(); ++i) {
      probs[view.legal[i]] = view.chance_probs[i];
    }
    return probs;
  }

 private:
  std::vector<Action> HistoryOf(const std::vector<double>& state) {
    std::string packed = PackTensor(state);
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = histories_.find(packed);
      if (it != histories_.end()) return it->second;
    }
    // Unseen state handed in from outside: reconstruct it exactly.
    auto actions = meta_->Reconstruct(state);
    Check(actions.has_value(), "model: unreachable state tensor");
    std::lock_guard<std::mutex> lock(mu_);
    histories_.emplace(std::move(packed), *actions);
    return *actions;
  }

  std::mutex mu_;
  std::unordered_map<std::string, std::vector<Action>> histories_;
};

class LearnedModelGame final : public ModelGame {
 public:
  LearnedModelGame(std::shared_ptr<const Game> meta, EnvModel model,
                   LearnedModelOptions options)
      : ModelGame(std::move(meta)), model_(std::move(model)) {
    Check(model_.game_id == meta_->id(), "model: env model for different game");
    root_state_ = meta_->EncodeState({}).joint;
    root_mask_ = model_.root_legal_mask;

    // Decode-fallback candidates: states observed in the dataset plus (when
    // affordable) all reachable encodings from the game definition.
    std::set<std::string> valid(model_.observed_states.begin(),
                                model_.observed_states.end());
    if (options.enumeration_budget > 0) {
      try {
        std::vector<std::string> reachable =
            EnumerateStateTensors(*meta_, options.enumeration_budget);
        valid.insert(reachable.begin(), reachable.end());
      } catch (const Error&) {
        // Tree too large to enumerate; dataset states carry the fallback.
      }
    }
    for (const std::string& packed : valid) {
      std::vector<double> tensor = UnpackTensor(packed);
      bool terminal = meta_->JointTensorPlayer(tensor) == kTerminalPlayer;
      (terminal ? terminal_states_ : decision_states_).push_back(std::move(tensor));
    }
  }

  Step ApplyAction(const std::vector<double>& state, Action a) override {
    ++steps_;
    std::string memo_key = PackTensor(state) + ':' + std::to_string(a);
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = memo_.find(memo_key);
      if (it != memo_.end()) return it->second;
    }

    auto heads = EnvForward(model_, state, a);
    const std::vector<double>& raw_state = heads[0];
    const std::vector<double>& raw_rewards = heads[1];
    bool terminal = heads[2][0] >= 0.5;
    const std::vector<double>& raw_mask = heads[3];

    Step step;
    step.terminal = terminal;
    step.next_state = DecodeNextState(raw_state, terminal);
    step.rewards = terminal ? raw_rewards
                            : std::vector<double>(meta_->NumPlayers(), 0.0);
    step.legal_mask.assign(meta_->MaxActions(), 0);
    if (!terminal) {
      int set = 0;
      for (int i = 0; i < meta_->MaxActions(); ++i) {
        if (raw_mask[i] >= 0.5) {
          step.legal_mask[i] = 1;
          ++set;
        }
      }
      if (set == 0) {
        // Empty prediction: fall back to the single most likely bit.
        int best = static_cast<int>(std::max_element(raw_mask.begin(),
                                                     raw_mask.end()) -
                                    raw_mask.begin());
        step.legal_mask[best] = 1;
      }
    }
    std::lock_guard<std::mutex> lock(mu_);
    memo_.emplace(std::move(memo_key), step);
    return step;
  }

  std::vector<double> ChanceDistribution(
      const std::vector<double>& state,
      const std::vector<uint8_t>& legal_mask) override {
    auto heads = EnvForward(model_, state, /*action=*/-1);
    const std::vector<double>& chance = heads[4];
    std::vector<double> probs(legal_mask.size(), 0.0);
    double total = 0;
    int legal = 0;
    for (size_t i = 0; i < legal_mask.size(); ++i) {
      if (legal_mask[i]) {
        total += (probs[i] = chance[i]);
        ++legal;
      }
    }
    Check(legal > 0, "model: chance with empty mask");
    if (total <= 0) {
      for (size_t i = 0; i < probs.size(); ++i) {
        probs[i] = legal_mask[i] ? 1.0 / legal : 0.0;
      }
      return probs;
    }
    for (double& p : probs) p /= total;
    return probs;
  }

 private:
  // Round to {0,1}; if the rounded tensor decodes to a state of the right
  // terminal class, take it, otherwise fall back to the nearest valid
  // state (L2 against the raw prediction). Fallbacks count as faults.
  std::vector<double> DecodeNextState(const std::vector<double>& raw,
                                      bool terminal) {
    std::vector<double> rounded(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) rounded[i] = raw[i] >= 0.5 ? 1.0 : 0.0;
    try {
      StateTuple tuple = meta_->DecodeState(rounded);
      if ((tuple.current_player == kTerminalPlayer) == terminal) return rounded;
    } catch (const Error&) {
    }
    ++decode_faults_;
    const std::vector<std::vector<double>>& pool =
        terminal ? terminal_states_ : decision_states_;
    if (pool.empty()) {
      Fatal("decode-fault: no valid " +
            std::string(terminal ? "terminal" : "decision") +
            " state available for fallback");
    }
    double best = std::numeric_limits<double>::infinity();
    const std::vector<double>* pick = nullptr;
    for (const std::vector<double>& candidate : pool) {
      double d = 0;
      for (size_t i = 0; i < raw.size(); ++i) {
        double diff = raw[i] - candidate[i];
        d += diff * diff;
      }
      if (d < best) {
        best = d;
        pick = &candidate;
      }
    }
    return *pick;
  }

  EnvModel model_;
  std::vector<std::vector<double>> decision_states_, terminal_states_;
  std::mutex mu_;
  std::unordered_map<std::string, Step> memo_;
};

}  // namespace

std::unique_ptr<ModelGame> MakePerfectModelGame(
    std::shared_ptr<const Game> game) {
  return std::make_unique<PerfectModelGame>(std::move(game));
}

std::unique_ptr<ModelGame> MakeLearnedModelGame(std::shared_ptr<const Game> meta,
                                                EnvModel model,
                                                LearnedModelOptions options) {
  return std::make_unique<LearnedModelGame>(std::move(meta), std::move(model),
                                            options);
}

FidelityReport EvaluateFidelity(ModelGame& model,
                                std::span<const TransitionRecord> records) {
  FidelityReport report;
  report.count = static_cast<int64_t>(records.size());
  int64_t state_ok = 0, terminal_ok = 0, mask_ok = 0;
  for (const TransitionRecord& rec : records) {
    ModelGame::Step step = model.ApplyAction(rec.state, rec.action);
    if (step.next_state == rec.next_state) ++state_ok;
    bool rewards_close = true;
    for (size_t i = 0; i < rec.rewards.size(); ++i) {
      rewards_close &= std::abs(step.rewards[i] - rec.rewards[i]) <= 0.1;
    }
    if (step.terminal == rec.terminal && rewards_close) ++terminal_ok;
    if (step.legal_mask == rec.next_legal_mask) ++mask_ok;
  }
  if (report.count > 0) {
    report.next_state_match = static_cast<double>(state_ok) / report.count;
    report.terminal_reward_match = static_cast<double>(terminal_ok) / report.count;
    report.legal_mask_match = static_cast<double>(mask_ok) / report.count;
  }
  return report;
}

// ---------------------------------------------------------------------------
// ModelTree
// ---------------------------------------------------------------------------

NodeView ModelTree::MakeView(const std::vector<double>& state,
                             const std::vector<uint8_t>& mask, bool terminal,
                             const std::vector<double>& rewards) const {
  NodeView view;
  if (terminal) {
    view.to_move = kTerminalPlayer;
    view.payoffs = rewards;
    return view;
  }
  view.to_move = model_->meta().JointTensorPlayer(state);
  for (size_t a = 0; a < mask.size(); ++a) {
    if (mask[a]) view.legal.push_back(static_cast<Action>(a));
  }
  Check(!view.legal.empty(), "model: decision state with empty mask");
  if (view.to_move == kChancePlayer) {
    std::vector<double> full = model_->ChanceDistribution(state, mask);
    for (Action a : view.legal) view.chance_probs.push_back(full[a]);
  } else if (view.to_move == kTerminalPlayer) {
    // The dynamics said "not terminal" but the state block disagrees;
    // treat the state block as authoritative for the actor and stop here.
    view.payoffs.assign(NumPlayers(), 0.0);
  }
  return view;
}

ModelTree::Node ModelTree::Root() const {
  Node node;
  node.state = model_->RootState();
  node.view = MakeView(node.state, model_->RootLegalMask(), false, {});
  node.depth = 0;
  return node;
}

ModelTree::Node ModelTree::Child(const Node& n, Action a) const {
  if (++nodes_ > node_budget_) {
    Fatal("model-blowup: tree expansion passed " + std::to_string(node_budget_) +
          " nodes");
  }
  Node child;
  child.depth = n.depth + 1;
  if (child.depth > depth_cap_) {
    // Runaway rollout under a faulty model; truncate to a null terminal.
    model_->NoteTruncation();
    child.state = n.state;
    child.view.to_move = kTerminalPlayer;
    child.view.payoffs.assign(NumPlayers(), 0.0);
    return child;
  }
  ModelGame::Step step = model_->ApplyAction(n.state, a);
  child.state = std::move(step.next_state);
  child.view = MakeView(child.state, step.legal_mask, step.terminal,
                        step.rewards);
  return child;
}

InfoSetKey ModelTree::Infoset(const Node& n, Player p) const {
  const Game& game = model_->meta();
  std::span<const double> slice(n.state);
  slice = slice.subspan(game.InfosetOffset(p), game.Dims().per_player);
  auto key = game.ParseInfosetTensor(p, slice);
  if (key.has_value()) return *key;
  // Unparseable slice (shouldn't happen after decode validation); key it
  // by raw bits so the solvers can still bucket consistently.
  InfoSetKey raw;
  raw.player = p;
  raw.key = "P" + std::to_string(p) + "|raw:" + PackTensor(slice);
  raw.tensor.assign(slice.begin(), slice.end());
  return raw;
}

std::string ModelTree::NodeKey(const Node& n) const {
  return PackTensor(n.state) + ':' + std::to_string(n.depth);
}

}  // namespace oef
