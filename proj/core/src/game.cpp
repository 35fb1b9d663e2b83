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

#include "oef/game.hpp"

#include <algorithm>

#include "oef/games.hpp"

namespace oef {

NodeView History::View() const { return game_->Analyze(actions_); }

std::vector<Action> History::LegalActions() const {
  NodeView v = View();
  if (v.IsTerminal()) Fatal("terminal: no legal actions at a terminal history");
  return v.legal;
}

History History::Child(Action a) const {
  NodeView v = View();
  if (v.IsTerminal()) Fatal("terminal: cannot act at a terminal history");
  if (!std::binary_search(v.legal.begin(), v.legal.end(), a)) {
    Fatal("illegal-action: action " + std::to_string(a) + " not in A(h)");
  }
  std::vector<Action> next = actions_;
  next.push_back(a);
  return History(game_, std::move(next));
}

std::vector<double> History::Returns() const {
  NodeView v = View();
  if (!v.IsTerminal()) Fatal("non-terminal: returns undefined");
  return v.payoffs;
}

std::vector<std::pair<Action, double>> History::ChanceDistribution() const {
  NodeView v = View();
  if (!v.IsChance()) Fatal("not-chance: chance distribution undefined");
  std::vector<std::pair<Action, double>> out;
  out.reserve(v.legal.size());
  for (size_t i = 0; i < v.legal.size(); ++i) {
    out.emplace_back(v.legal[i], v.chance_probs[i]);
  }
  return out;
}

InfoSetKey History::Infoset(Player p) const { return game_->Infoset(actions_, p); }

StateTuple History::EncodeState() const { return game_->EncodeState(actions_); }

StateTuple Game::EncodeState(std::span<const Action> h) const {
  StateTuple s;
  s.per_player_infosets.reserve(num_players_);
  s.joint.reserve(Dims().joint);
  for (Player p = 0; p < num_players_; ++p) {
    InfoSetKey key = Infoset(h, p);
    s.joint.insert(s.joint.end(), key.tensor.begin(), key.tensor.end());
    s.per_player_infosets.push_back(std::move(key));
  }
  NodeView v = Analyze(h);
  s.current_player = v.to_move;
  std::vector<double> block(num_players_ + 1, 0.0);
  if (v.IsChance()) {
    block[num_players_] = 1.0;
  } else if (!v.IsTerminal()) {
    block[v.to_move] = 1.0;
  }
  s.joint.insert(s.joint.end(), block.begin(), block.end());
  return s;
}

Player Game::JointTensorPlayer(std::span<const double> joint) const {
  Check(static_cast<int>(joint.size()) == Dims().joint, "bad-length");
  std::span<const double> block = joint.subspan(num_players_ * per_player_dim_);
  int set = -1;
  for (int i = 0; i <= num_players_; ++i) {
    if (block[i] == 1.0) {
      if (set >= 0) Fatal("undecodable: multiple current-player bits");
      set = i;
    } else if (block[i] != 0.0) {
      Fatal("undecodable: non-binary current-player block");
    }
  }
  if (set < 0) return kTerminalPlayer;
  return set == num_players_ ? kChancePlayer : set;
}

StateTuple Game::DecodeState(std::span<const double> joint) const {
  if (static_cast<int>(joint.size()) != Dims().joint) Fatal("bad-length");
  std::optional<std::vector<Action>> actions = Reconstruct(joint);
  if (!actions.has_value()) Fatal("undecodable: tensor matches no state");
  StateTuple s = EncodeState(*actions);
  if (!std::equal(s.joint.begin(), s.joint.end(), joint.begin())) {
    Fatal("undecodable: inconsistent encoding");
  }
  return s;
}

std::shared_ptr<const Game> MakeGame(const std::string& id) {
  if (id == "kuhn2") return std::make_shared<KuhnGame>(2);
  if (id == "kuhn3") return std::make_shared<KuhnGame>(3);
  if (id == "kuhn4") return std::make_shared<KuhnGame>(4);
  if (id == "kuhn5") return std::make_shared<KuhnGame>(5);
  if (id == "leduc2") return std::make_shared<LeducGame>(2);
  if (id == "leduc3") return std::make_shared<LeducGame>(3);
  if (id == "liars2") return std::make_shared<LiarsDiceGame>(2);
  if (id == "liars3") return std::make_shared<LiarsDiceGame>(3);
  if (id == "liars6") return std::make_shared<LiarsDiceGame>(6);
  if (id == "pttt") return std::make_shared<PhantomTttGame>();
  Fatal("unknown-game: " + id);
}

std::vector<std::string> SupportedGameIds() {
  return {"kuhn2", "kuhn3", "kuhn4", "kuhn5", "leduc2",
          "leduc3", "liars2", "liars3", "liars6", "pttt"};
}

}  // namespace oef
