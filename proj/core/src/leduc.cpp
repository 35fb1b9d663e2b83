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

char ActionChar(Action a) {
  switch (a) {
    case LeducGame::kFold: return 'f';
    case LeducGame::kCall: return 'c';
    default: return 'r';
  }
}

}  // namespace

struct LeducGame::Parsed {
  bool valid = true;
  bool dealt = false;
  std::vector<int> cards;
  int public_card = -1;
  int round = 1;
  std::vector<Action> r1, r2;
  std::vector<bool> active;
  std::vector<double> contribution;
  std::vector<double> round_contrib;
  double current_bet = 0;
  int raises = 0;
  int num_to_act = 0;
  int turn = 0;
  bool awaiting_public = false;
  bool terminal = false;

  int ActiveCount() const {
    return static_cast<int>(std::count(active.begin(), active.end(), true));
  }
  void AdvanceTurn() {
    int n = static_cast<int>(active.size());
    do {
      turn = (turn + 1) % n;
    } while (!active[turn]);
  }
  void StartRound(int r) {
    round = r;
    std::fill(round_contrib.begin(), round_contrib.end(), 0.0);
    current_bet = 0;
    raises = 0;
    num_to_act = ActiveCount();
    turn = 0;
    while (!active[turn]) ++turn;
  }
  std::vector<Action> Legal() const {
    std::vector<Action> legal;
    if (current_bet > round_contrib[turn]) legal.push_back(kFold);
    legal.push_back(kCall);
    if (raises < kMaxRaisesPerRound) legal.push_back(kRaise);
    return legal;
  }
  bool Apply(Action a) {  // betting action for player `turn`
    double owed = current_bet - round_contrib[turn];
    switch (a) {
      case kFold:
        if (owed <= 0) return false;
        active[turn] = false;
        --num_to_act;
        break;
      case kCall:
        contribution[turn] += owed;
        round_contrib[turn] = current_bet;
        --num_to_act;
        break;
      case kRaise: {
        if (raises >= kMaxRaisesPerRound) return false;
        double amount = round == 1 ? 2.0 : 4.0;
        contribution[turn] += owed + amount;
        round_contrib[turn] = current_bet + amount;
        current_bet += amount;
        ++raises;
        num_to_act = ActiveCount() - 1;
        break;
      }
      default:
        return false;
    }
    if (ActiveCount() == 1) {
      terminal = true;
      return true;
    }
    if (num_to_act == 0) {
      if (round == 1) {
        awaiting_public = true;
      } else {
        terminal = true;
      }
      return true;
    }
    AdvanceTurn();
    return true;
  }
};

LeducGame::LeducGame(int num_players)
    : Game("leduc" + std::to_string(num_players), num_players,
           /*max_actions=*/0, /*per_player_dim=*/0,
           /*max_episode_length=*/2 + 2 * (num_players + 4)) {
  Check(num_players >= 2 && num_players <= 3, "leduc: players must be 2..3");
  deals_ = OrderedDeals(DeckSize(), num_players);
  max_actions_ = std::max<int>(static_cast<int>(deals_.size()), 3);
  per_player_dim_ = 2 * DeckSize() + 2 * RoundSlots() * 3;
}

LeducGame::Parsed LeducGame::Parse(std::span<const Action> h) const {
  Parsed st;
  st.active.assign(num_players_, true);
  st.contribution.assign(num_players_, 1.0);  // antes
  st.round_contrib.assign(num_players_, 0.0);
  if (h.empty()) return st;
  Check(h[0] >= 0 && h[0] < static_cast<int>(deals_.size()), "leduc: bad deal");
  st.dealt = true;
  st.cards = deals_[h[0]];
  st.num_to_act = num_players_;
  for (size_t i = 1; i < h.size(); ++i) {
    Action a = h[i];
    Check(!st.terminal, "leduc: action after terminal");
    if (st.awaiting_public) {
      Check(a >= 0 && a < DeckSize(), "leduc: bad public card");
      Check(std::find(st.cards.begin(), st.cards.end(), a) == st.cards.end(),
            "leduc: public card already dealt");
      st.public_card = a;
      st.awaiting_public = false;
      st.StartRound(2);
      continue;
    }
    (st.round == 1 ? st.r1 : st.r2).push_back(a);
    Check(st.Apply(a), "leduc: illegal betting action");
  }
  return st;
}

NodeView LeducGame::Analyze(std::span<const Action> h) const {
  Parsed st = Parse(h);
  NodeView v;
  if (!st.dealt) {
    v.to_move = kChancePlayer;
    v.legal.resize(deals_.size());
    std::iota(v.legal.begin(), v.legal.end(), 0);
    v.chance_probs.assign(deals_.size(), 1.0 / static_cast<double>(deals_.size()));
    return v;
  }
  if (st.awaiting_public) {
    v.to_move = kChancePlayer;
    for (int c = 0; c < DeckSize(); ++c) {
      if (std::find(st.cards.begin(), st.cards.end(), c) == st.cards.end()) {
        v.legal.push_back(c);
      }
    }
    v.chance_probs.assign(v.legal.size(), 1.0 / static_cast<double>(v.legal.size()));
    return v;
  }
  if (!st.terminal) {
    v.to_move = st.turn;
    v.legal = st.Legal();
    return v;
  }
  v.to_move = kTerminalPlayer;
  double pot = std::accumulate(st.contribution.begin(), st.contribution.end(), 0.0);
  std::vector<Player> winners;
  if (st.ActiveCount() == 1) {
    for (Player p = 0; p < num_players_; ++p) {
      if (st.active[p]) winners.push_back(p);
    }
  } else {
    int pub_rank = st.public_card / 2;
    for (Player p = 0; p < num_players_; ++p) {
      if (st.active[p] && st.cards[p] / 2 == pub_rank) winners.push_back(p);
    }
    if (winners.empty()) {
      int best = -1;
      for (Player p = 0; p < num_players_; ++p) {
        if (st.active[p]) best = std::max(best, st.cards[p] / 2);
      }
      for (Player p = 0; p < num_players_; ++p) {
        if (st.active[p] && st.cards[p] / 2 == best) winners.push_back(p);
      }
    }
  }
  double share = pot / static_cast<double>(winners.size());
  v.payoffs.resize(num_players_);
  for (Player p = 0; p < num_players_; ++p) {
    bool won = std::find(winners.begin(), winners.end(), p) != winners.end();
    v.payoffs[p] = (won ? share : 0.0) - st.contribution[p];
  }
  return v;
}

void LeducGame::EncodeView(const Parsed& st, Player p, std::string* key,
                           std::vector<double>* tensor) const {
  std::string r1, r2;
  for (Action a : st.r1) r1 += ActionChar(a);
  for (Action a : st.r2) r2 += ActionChar(a);
  if (key != nullptr) {
    *key = "P" + std::to_string(p) + "|c:" +
           (st.dealt ? std::to_string(st.cards[p]) : std::string("-")) +
           " pub:" +
           (st.public_card >= 0 ? std::to_string(st.public_card) : std::string("-")) +
           " r1:" + r1 + " r2:" + r2;
  }
  if (tensor != nullptr) {
    tensor->assign(per_player_dim_, 0.0);
    if (st.dealt) (*tensor)[st.cards[p]] = 1.0;
    if (st.public_card >= 0) (*tensor)[DeckSize() + st.public_card] = 1.0;
    int base = 2 * DeckSize();
    Check(static_cast<int>(st.r1.size()) <= RoundSlots() &&
              static_cast<int>(st.r2.size()) <= RoundSlots(),
          "leduc: betting sequence exceeds encoding slots");
    for (size_t t = 0; t < st.r1.size(); ++t) {
      (*tensor)[base + 3 * static_cast<int>(t) + st.r1[t]] = 1.0;
    }
    base += 3 * RoundSlots();
    for (size_t t = 0; t < st.r2.size(); ++t) {
      (*tensor)[base + 3 * static_cast<int>(t) + st.r2[t]] = 1.0;
    }
  }
}

InfoSetKey LeducGame::Infoset(std::span<const Action> h, Player p) const {
  Check(p >= 0 && p < num_players_, "leduc: bad player");
  Parsed st = Parse(h);
  InfoSetKey key;
  key.player = p;
  EncodeView(st, p, &key.key, &key.tensor);
  return key;
}

std::optional<InfoSetKey> LeducGame::ParseInfosetTensor(
    Player p, std::span<const double> tensor) const {
  if (p < 0 || p >= num_players_) return std::nullopt;
  if (static_cast<int>(tensor.size()) != per_player_dim_) return std::nullopt;
  for (double x : tensor) {
    if (x != 0.0 && x != 1.0) return std::nullopt;
  }
  int own = -1, pub = -1;
  for (int c = 0; c < DeckSize(); ++c) {
    if (tensor[c] == 1.0) {
      if (own >= 0) return std::nullopt;
      own = c;
    }
    if (tensor[DeckSize() + c] == 1.0) {
      if (pub >= 0) return std::nullopt;
      pub = c;
    }
  }
  if (own >= 0 && own == pub) return std::nullopt;
  auto read_round = [&](int base) -> std::optional<std::vector<Action>> {
    std::vector<Action> seq;
    bool ended = false;
    for (int t = 0; t < RoundSlots(); ++t) {
      int bits = 0;
      Action a = -1;
      for (Action c = 0; c < 3; ++c) {
        if (tensor[base + 3 * t + c] == 1.0) {
          ++bits;
          a = c;
        }
      }
      if (bits > 1) return std::nullopt;
      if (bits == 0) {
        ended = true;
        continue;
      }
      if (ended) return std::nullopt;
      seq.push_back(a);
    }
    return seq;
  };
  auto r1 = read_round(2 * DeckSize());
  auto r2 = read_round(2 * DeckSize() + 3 * RoundSlots());
  if (!r1.has_value() || !r2.has_value()) return std::nullopt;
  if (own < 0 && (pub >= 0 || !r1->empty() || !r2->empty())) return std::nullopt;

  // Replay the betting skeleton to verify it is a reachable prefix.
  Parsed st;
  st.active.assign(num_players_, true);
  st.contribution.assign(num_players_, 1.0);
  st.round_contrib.assign(num_players_, 0.0);
  st.dealt = own >= 0;
  st.num_to_act = num_players_;
  for (Action a : *r1) {
    if (st.terminal || st.awaiting_public || !st.Apply(a)) return std::nullopt;
    st.r1.push_back(a);
  }
  if (pub >= 0) {
    if (!st.awaiting_public) return std::nullopt;
    st.public_card = pub;
    st.awaiting_public = false;
    st.StartRound(2);
  } else if (!r2->empty()) {
    return std::nullopt;
  }
  for (Action a : *r2) {
    if (st.terminal || !st.Apply(a)) return std::nullopt;
    st.r2.push_back(a);
  }
  if (st.dealt) st.cards.assign(num_players_, -1), st.cards[p] = own;

  InfoSetKey key;
  key.player = p;
  std::string k;
  EncodeView(st, p, &k, nullptr);
  key.key = std::move(k);
  key.tensor.assign(tensor.begin(), tensor.end());
  return key;
}

std::optional<std::vector<Action>> LeducGame::Reconstruct(
    std::span<const double> joint) const {
  if (static_cast<int>(joint.size()) != Dims().joint) return std::nullopt;
  std::vector<int> cards;
  int pub = -1;
  std::vector<double> public_bits;
  for (Player p = 0; p < num_players_; ++p) {
    std::span<const double> block = joint.subspan(InfosetOffset(p), per_player_dim_);
    if (!ParseInfosetTensor(p, block).has_value()) return std::nullopt;
    int own = -1;
    for (int c = 0; c < DeckSize(); ++c) {
      if (block[c] == 1.0) own = c;
    }
    // Everything but the private card is public and must agree.
    std::vector<double> rest(block.begin() + DeckSize(), block.end());
    if (p == 0) {
      public_bits = rest;
    } else if (public_bits != rest) {
      return std::nullopt;
    }
    if (own >= 0) cards.push_back(own);
    for (int c = 0; c < DeckSize(); ++c) {
      if (block[DeckSize() + c] == 1.0) pub = c;
    }
  }
  if (cards.empty()) return std::vector<Action>{};
  if (static_cast<int>(cards.size()) != num_players_) return std::nullopt;
  auto it = std::find(deals_.begin(), deals_.end(), cards);
  if (it == deals_.end()) return std::nullopt;
  if (pub >= 0 &&
      std::find(cards.begin(), cards.end(), pub) != cards.end()) {
    return std::nullopt;
  }

  // Rebuild the action list by replaying the public betting skeleton.
  std::span<const double> block0 = joint.subspan(0, per_player_dim_);
  std::vector<Action> actions;
  actions.push_back(static_cast<Action>(it - deals_.begin()));
  int base = 2 * DeckSize();
  for (int t = 0; t < RoundSlots(); ++t) {
    for (Action c = 0; c < 3; ++c) {
      if (block0[base + 3 * t + c] == 1.0) actions.push_back(c);
    }
  }
  if (pub >= 0) actions.push_back(pub);
  base += 3 * RoundSlots();
  for (int t = 0; t < RoundSlots(); ++t) {
    for (Action c = 0; c < 3; ++c) {
      if (block0[base + 3 * t + c] == 1.0) actions.push_back(c);
    }
  }
  return actions;
}

}  // namespace oef
