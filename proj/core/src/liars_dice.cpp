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

#include <algorithm>
#include <numeric>

#include "oef/games.hpp"

namespace oef {

struct LiarsDiceGame::Parsed {
  int rolls[2] = {-1, -1};  // die face index 0..sides-1, -1 before the roll
  std::vector<Action> bids;
  bool liar_called = false;
  bool terminal = false;
  Player to_move = kChancePlayer;
};

LiarsDiceGame::LiarsDiceGame(int sides)
    : Game("liars" + std::to_string(sides), /*num_players=*/2,
           /*max_actions=*/2 * sides + 1,
           /*per_player_dim=*/3 * sides + 1,
           /*max_episode_length=*/2 * sides + 3),
      sides_(sides) {
  Check(sides >= 2 && sides <= 6, "liars: sides must be 2..6");
}

LiarsDiceGame::Parsed LiarsDiceGame::Parse(std::span<const Action> h) const {
  Parsed st;
  size_t i = 0;
  for (int p = 0; p < 2 && i < h.size(); ++p, ++i) {
    Check(h[i] >= 0 && h[i] < sides_, "liars: bad roll");
    st.rolls[p] = h[i];
  }
  if (st.rolls[0] < 0 || st.rolls[1] < 0) {
    st.to_move = kChancePlayer;
    Check(i == h.size(), "liars: bids before rolls");
    return st;
  }
  int last_bid = -1;
  for (; i < h.size(); ++i) {
    Action a = h[i];
    Check(!st.terminal, "liars: action after terminal");
    if (a == LiarAction()) {
      Check(!st.bids.empty(), "liars: liar call with no bid");
      st.liar_called = true;
      st.terminal = true;
    } else {
      Check(a >= 0 && a < NumBids() && a > last_bid, "liars: bad bid");
      st.bids.push_back(a);
      last_bid = a;
    }
  }
  st.to_move = st.terminal
                   ? kTerminalPlayer
                   : static_cast<Player>((st.bids.size() + (st.liar_called ? 1 : 0)) % 2);
  return st;
}

NodeView LiarsDiceGame::Analyze(std::span<const Action> h) const {
  Parsed st = Parse(h);
  NodeView v;
  if (st.rolls[0] < 0 || st.rolls[1] < 0) {
    v.to_move = kChancePlayer;
    v.legal.resize(sides_);
    std::iota(v.legal.begin(), v.legal.end(), 0);
    v.chance_probs.assign(sides_, 1.0 / static_cast<double>(sides_));
    return v;
  }
  if (!st.terminal) {
    v.to_move = st.to_move;
    int last_bid = st.bids.empty() ? -1 : st.bids.back();
    for (Action b = last_bid + 1; b < NumBids(); ++b) v.legal.push_back(b);
    if (!st.bids.empty()) v.legal.push_back(LiarAction());
    return v;
  }
  v.to_move = kTerminalPlayer;
  Action challenged = st.bids.back();
  int face = BidFace(challenged);
  int count = BidCount(challenged);
  int actual = (st.rolls[0] + 1 == face ? 1 : 0) + (st.rolls[1] + 1 == face ? 1 : 0);
  Player caller = static_cast<Player>(st.bids.size() % 2);
  Player bidder = 1 - caller;
  bool bid_stands = actual >= count;
  v.payoffs.assign(2, 0.0);
  v.payoffs[bid_stands ? bidder : caller] = 1.0;
  v.payoffs[bid_stands ? caller : bidder] = -1.0;
  return v;
}

InfoSetKey LiarsDiceGame::Infoset(std::span<const Action> h, Player p) const {
  Check(p >= 0 && p < 2, "liars: bad player");
  Parsed st = Parse(h);
  InfoSetKey key;
  key.player = p;
  std::string bids;
  for (Action b : st.bids) {
    if (!bids.empty()) bids += ',';
    bids += std::to_string(b);
  }
  key.key = "P" + std::to_string(p) + "|d:" +
            (st.rolls[p] >= 0 ? std::to_string(st.rolls[p]) : std::string("-")) +
            " b:" + bids + (st.liar_called ? " L" : "");
  key.tensor.assign(per_player_dim_, 0.0);
  if (st.rolls[p] >= 0) key.tensor[st.rolls[p]] = 1.0;
  for (Action b : st.bids) key.tensor[sides_ + b] = 1.0;
  if (st.liar_called) key.tensor[3 * sides_] = 1.0;
  return key;
}

std::optional<InfoSetKey> LiarsDiceGame::ParseInfosetTensor(
    Player p, std::span<const double> tensor) const {
  if (p < 0 || p >= 2) return std::nullopt;
  if (static_cast<int>(tensor.size()) != per_player_dim_) return std::nullopt;
  for (double x : tensor) {
    if (x != 0.0 && x != 1.0) return std::nullopt;
  }
  int die = -1;
  for (int f = 0; f < sides_; ++f) {
    if (tensor[f] == 1.0) {
      if (die >= 0) return std::nullopt;
      die = f;
    }
  }
  std::vector<Action> bids;
  for (Action b = 0; b < NumBids(); ++b) {
    if (tensor[sides_ + b] == 1.0) bids.push_back(b);
  }
  bool liar = tensor[3 * sides_] == 1.0;
  if (die < 0 && (!bids.empty() || liar)) return std::nullopt;
  if (liar && bids.empty()) return std::nullopt;

  InfoSetKey key;
  key.player = p;
  std::string bid_str;
  for (Action b : bids) {
    if (!bid_str.empty()) bid_str += ',';
    bid_str += std::to_string(b);
  }
  key.key = "P" + std::to_string(p) + "|d:" +
            (die >= 0 ? std::to_string(die) : std::string("-")) + " b:" + bid_str +
            (liar ? " L" : "");
  key.tensor.assign(tensor.begin(), tensor.end());
  return key;
}

std::optional<std::vector<Action>> LiarsDiceGame::Reconstruct(
    std::span<const double> joint) const {
  if (static_cast<int>(joint.size()) != Dims().joint) return std::nullopt;
  std::span<const double> b0 = joint.subspan(InfosetOffset(0), per_player_dim_);
  std::span<const double> b1 = joint.subspan(InfosetOffset(1), per_player_dim_);
  if (!ParseInfosetTensor(0, b0).has_value()) return std::nullopt;
  if (!ParseInfosetTensor(1, b1).has_value()) return std::nullopt;
  // The bid trail and liar flag are public.
  for (int i = sides_; i < per_player_dim_; ++i) {
    if (b0[i] != b1[i]) return std::nullopt;
  }
  int r0 = -1, r1 = -1;
  for (int f = 0; f < sides_; ++f) {
    if (b0[f] == 1.0) r0 = f;
    if (b1[f] == 1.0) r1 = f;
  }
  std::vector<Action> actions;
  if (r0 < 0 && r1 < 0) return actions;  // root
  if (r0 >= 0 && r1 < 0) {
    bool trail_empty = true;
    for (int i = sides_; i < per_player_dim_; ++i) trail_empty &= b0[i] == 0.0;
    if (!trail_empty) return std::nullopt;
    actions.push_back(r0);
    return actions;
  }
  if (r0 < 0) return std::nullopt;  // player 0 rolls first
  actions.push_back(r0);
  actions.push_back(r1);
  // Strictly increasing bids: the set of raised bits is the chronology.
  for (Action b = 0; b < NumBids(); ++b) {
    if (b0[sides_ + b] == 1.0) actions.push_back(b);
  }
  if (b0[3 * sides_] == 1.0) actions.push_back(LiarAction());
  return actions;
}

}  // namespace oef
