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

namespace {

// Ordered deals of `take` distinct cards from {0..deck-1}, lexicographic.
std::vector<std::vector<int>> OrderedDeals(int deck, int take) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  std::vector<bool> used(deck, false);
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(current.size()) == take) {
      out.push_back(current);
      return;
    }
    for (int c = 0; c < deck; ++c) {
      if (used[c]) continue;
      used[c] = true;
      current.push_back(c);
      self(self);
      current.pop_back();
      used[c] = false;
    }
  };
  rec(rec);
  return out;
}

}  // namespace

struct KuhnGame::Parsed {
  bool dealt = false;
  std::vector<int> cards;        // per player, valid when dealt
  std::vector<Action> betting;   // pass/bet sequence
  int first_bet = -1;            // index into betting, -1 if none
  bool terminal = false;
  Player to_move = kChancePlayer;
};

KuhnGame::KuhnGame(int num_players)
    : Game("kuhn" + std::to_string(num_players), num_players,
           /*max_actions=*/0, /*per_player_dim=*/0,
           /*max_episode_length=*/2 * num_players) {
  Check(num_players >= 2 && num_players <= 5, "kuhn: players must be 2..5");
  deals_ = OrderedDeals(NumCards(), num_players);
  max_actions_ = std::max<int>(static_cast<int>(deals_.size()), 2);
  per_player_dim_ = NumCards() + 2 * (2 * num_players - 1);
}

KuhnGame::Parsed KuhnGame::Parse(std::span<const Action> h) const {
  Parsed st;
  if (h.empty()) return st;
  Check(h[0] >= 0 && h[0] < static_cast<int>(deals_.size()), "kuhn: bad deal");
  st.dealt = true;
  st.cards = deals_[h[0]];
  st.betting.assign(h.begin() + 1, h.end());
  for (size_t t = 0; t < st.betting.size(); ++t) {
    Check(st.betting[t] == kPass || st.betting[t] == kBet, "kuhn: bad action");
    if (st.betting[t] == kBet && st.first_bet < 0) st.first_bet = static_cast<int>(t);
  }
  int len = static_cast<int>(st.betting.size());
  if (st.first_bet < 0) {
    st.terminal = (len == num_players_);
  } else {
    st.terminal = (len == st.first_bet + num_players_);
  }
  st.to_move = st.terminal ? kTerminalPlayer : len % num_players_;
  return st;
}

NodeView KuhnGame::Analyze(std::span<const Action> h) const {
  Parsed st = Parse(h);
  NodeView v;
  if (!st.dealt) {
    v.to_move = kChancePlayer;
    v.legal.resize(deals_.size());
    std::iota(v.legal.begin(), v.legal.end(), 0);
    v.chance_probs.assign(deals_.size(), 1.0 / static_cast<double>(deals_.size()));
    return v;
  }
  if (!st.terminal) {
    v.to_move = st.to_move;
    v.legal = {kPass, kBet};
    return v;
  }
  // Showdown / fold resolution. Everyone antes 1; the bettor and callers
  // add 1 more; the best card among contenders takes the pot.
  v.to_move = kTerminalPlayer;
  std::vector<bool> contends(num_players_, true);
  std::vector<double> contribution(num_players_, 1.0);
  if (st.first_bet >= 0) {
    Player bettor = st.first_bet % num_players_;
    contends.assign(num_players_, false);
    contends[bettor] = true;
    contribution[bettor] = 2.0;
    for (int t = st.first_bet + 1; t < static_cast<int>(st.betting.size()); ++t) {
      Player responder = t % num_players_;
      if (st.betting[t] == kBet) {  // call
        contends[responder] = true;
        contribution[responder] = 2.0;
      }
    }
  }
  double pot = std::accumulate(contribution.begin(), contribution.end(), 0.0);
  Player winner = -1;
  for (Player p = 0; p < num_players_; ++p) {
    if (contends[p] && (winner < 0 || st.cards[p] > st.cards[winner])) winner = p;
  }
  v.payoffs.resize(num_players_);
  for (Player p = 0; p < num_players_; ++p) {
    v.payoffs[p] = (p == winner ? pot : 0.0) - contribution[p];
  }
  return v;
}

InfoSetKey KuhnGame::Infoset(std::span<const Action> h, Player p) const {
  Check(p >= 0 && p < num_players_, "kuhn: bad player");
  Parsed st = Parse(h);
  InfoSetKey key;
  key.player = p;
  std::string seq;
  for (Action a : st.betting) seq += (a == kBet ? 'b' : 'p');
  key.key = "P" + std::to_string(p) + "|" +
            (st.dealt ? std::to_string(st.cards[p]) : std::string("-")) + ":" + seq;
  key.tensor.assign(per_player_dim_, 0.0);
  if (st.dealt) key.tensor[st.cards[p]] = 1.0;
  for (size_t t = 0; t < st.betting.size(); ++t) {
    key.tensor[NumCards() + 2 * t + (st.betting[t] == kBet ? 1 : 0)] = 1.0;
  }
  return key;
}

std::optional<InfoSetKey> KuhnGame::ParseInfosetTensor(
    Player p, std::span<const double> tensor) const {
  if (p < 0 || p >= num_players_) return std::nullopt;
  if (static_cast<int>(tensor.size()) != per_player_dim_) return std::nullopt;
  for (double x : tensor) {
    if (x != 0.0 && x != 1.0) return std::nullopt;
  }
  int card = -1;
  for (int c = 0; c < NumCards(); ++c) {
    if (tensor[c] == 1.0) {
      if (card >= 0) return std::nullopt;
      card = c;
    }
  }
  std::vector<Action> betting;
  bool ended = false;
  for (int t = 0; t < 2 * num_players_ - 1; ++t) {
    double pass_bit = tensor[NumCards() + 2 * t];
    double bet_bit = tensor[NumCards() + 2 * t + 1];
    if (pass_bit == 1.0 && bet_bit == 1.0) return std::nullopt;
    if (pass_bit == 0.0 && bet_bit == 0.0) {
      ended = true;
      continue;
    }
    if (ended) return std::nullopt;  // gap in the sequence
    betting.push_back(bet_bit == 1.0 ? kBet : kPass);
  }
  if (card < 0 && !betting.empty()) return std::nullopt;
  // The sequence must be a prefix of a legal betting line.
  int first_bet = -1;
  for (size_t t = 0; t < betting.size(); ++t) {
    if (betting[t] == kBet && first_bet < 0) first_bet = static_cast<int>(t);
  }
  int len = static_cast<int>(betting.size());
  if (first_bet < 0 && len > num_players_) return std::nullopt;
  if (first_bet >= 0 && len > first_bet + num_players_) return std::nullopt;

  InfoSetKey key;
  key.player = p;
  std::string seq;
  for (Action a : betting) seq += (a == kBet ? 'b' : 'p');
  key.key = "P" + std::to_string(p) + "|" +
            (card >= 0 ? std::to_string(card) : std::string("-")) + ":" + seq;
  key.tensor.assign(tensor.begin(), tensor.end());
  return key;
}

std::optional<std::vector<Action>> KuhnGame::Reconstruct(
    std::span<const double> joint) const {
  if (static_cast<int>(joint.size()) != Dims().joint) return std::nullopt;
  std::vector<int> cards;
  std::vector<Action> betting;
  for (Player p = 0; p < num_players_; ++p) {
    auto view = ParseInfosetTensor(p, joint.subspan(InfosetOffset(p), per_player_dim_));
    if (!view.has_value()) return std::nullopt;
    int card = -1;
    for (int c = 0; c < NumCards(); ++c) {
      if (view->tensor[c] == 1.0) card = c;
    }
    std::vector<Action> seq;
    for (int t = 0; t < 2 * num_players_ - 1; ++t) {
      if (view->tensor[NumCards() + 2 * t] == 1.0) seq.push_back(kPass);
      if (view->tensor[NumCards() + 2 * t + 1] == 1.0) seq.push_back(kBet);
    }
    if (p == 0) {
      betting = seq;
    } else if (betting != seq) {
      return std::nullopt;  // betting is public
    }
    if (card >= 0) cards.push_back(card);
  }
  if (cards.empty()) {
    if (!betting.empty()) return std::nullopt;
    return std::vector<Action>{};  // root
  }
  if (static_cast<int>(cards.size()) != num_players_) return std::nullopt;
  auto it = std::find(deals_.begin(), deals_.end(), cards);
  if (it == deals_.end()) return std::nullopt;
  std::vector<Action> actions;
  actions.push_back(static_cast<Action>(it - deals_.begin()));
  actions.insert(actions.end(), betting.begin(), betting.end());
  return actions;
}

}  // namespace oef
