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

#ifndef OEF_GAMES_HPP_
#define OEF_GAMES_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oef/game.hpp"

namespace oef {

// n-player Kuhn poker with n+1 cards: every player antes 1, a single joint
// chance deal at the root, then one betting round (pass/bet then fold/call).
class KuhnGame : public Game {
 public:
  explicit KuhnGame(int num_players);

  NodeView Analyze(std::span<const Action> h) const override;
  InfoSetKey Infoset(std::span<const Action> h, Player p) const override;
  std::optional<InfoSetKey> ParseInfosetTensor(
      Player p, std::span<const double> tensor) const override;
  std::optional<std::vector<Action>> Reconstruct(
      std::span<const double> joint) const override;

  static constexpr Action kPass = 0;
  static constexpr Action kBet = 1;

  int NumCards() const { return num_players_ + 1; }
  const std::vector<std::vector<int>>& Deals() const { return deals_; }

 private:
  struct Parsed;
  Parsed Parse(std::span<const Action> h) const;

  std::vector<std::vector<int>> deals_;  // deal action -> per-player cards
};

// n-player Leduc poker: deck of (n+1) ranks x 2 suits, one private card
// each (joint chance deal), two betting rounds with fold/call/raise, fixed
// raise sizes (2 then 4), at most two raises per round, one public card
// between rounds. A paired hand beats rank-high hands; equal ranks split.
class LeducGame : public Game {
 public:
  explicit LeducGame(int num_players);

  NodeView Analyze(std::span<const Action> h) const override;
  InfoSetKey Infoset(std::span<const Action> h, Player p) const override;
  std::optional<InfoSetKey> ParseInfosetTensor(
      Player p, std::span<const double> tensor) const override;
  std::optional<std::vector<Action>> Reconstruct(
      std::span<const double> joint) const override;

  static constexpr Action kFold = 0;
  static constexpr Action kCall = 1;
  static constexpr Action kRaise = 2;
  static constexpr int kMaxRaisesPerRound = 2;

  int DeckSize() const { return 2 * (num_players_ + 1); }
  int RoundSlots() const { return num_players_ + 4; }
  const std::vector<std::vector<int>>& Deals() const { return deals_; }

 private:
  struct Parsed;
  Parsed Parse(std::span<const Action> h) const;
  void EncodeView(const Parsed& st, Player p, std::string* key,
                  std::vector<double>* tensor) const;

  std::vector<std::vector<int>> deals_;
};

// Two-player Liar's Dice, one die per player with `sides` faces. Chance
// rolls each die in turn, then players alternate strictly-increasing
// (count, face) bids until someone calls Liar. No wild faces.
class LiarsDiceGame : public Game {
 public:
  explicit LiarsDiceGame(int sides);

  NodeView Analyze(std::span<const Action> h) const override;
  InfoSetKey Infoset(std::span<const Action> h, Player p) const override;
  std::optional<InfoSetKey> ParseInfosetTensor(
      Player p, std::span<const double> tensor) const override;
  std::optional<std::vector<Action>> Reconstruct(
      std::span<const double> joint) const override;

  int Sides() const { return sides_; }
  int NumBids() const { return 2 * sides_; }
  Action LiarAction() const { return 2 * sides_; }
  int BidCount(Action bid) const { return bid / sides_ + 1; }
  int BidFace(Action bid) const { return bid % sides_ + 1; }

 private:
  struct Parsed;
  Parsed Parse(std::span<const Action> h) const;

  int sides_;
};

// Phantom Tic-Tac-Toe: the classical variant where a move onto an
// opponent-occupied cell is revealed to the mover, who then tries again.
class PhantomTttGame : public Game {
 public:
  PhantomTttGame();

  NodeView Analyze(std::span<const Action> h) const override;
  InfoSetKey Infoset(std::span<const Action> h, Player p) const override;
  std::optional<InfoSetKey> ParseInfosetTensor(
      Player p, std::span<const double> tensor) const override;
  std::optional<std::vector<Action>> Reconstruct(
      std::span<const double> joint) const override;

  static constexpr int kCells = 9;
  static constexpr int kMaxAttempts = 9;  // 5 placements + 4 revealed blocks

 private:
  struct Parsed;
  Parsed Parse(std::span<const Action> h) const;
};

}  // namespace oef

#endif  // OEF_GAMES_HPP_
