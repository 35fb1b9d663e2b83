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

#ifndef OEF_GAME_HPP_
#define OEF_GAME_HPP_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oef/types.hpp"

namespace oef {

struct EncodingDims {
  int per_player = 0;  // length of one player's infoset tensor
  int joint = 0;       // n * per_player + (n + 1) current-player block
};

// Canonical identification of one information set. `key` is unique per
// (player, information set); `tensor` is a fixed-length {0,1} encoding that
// round-trips with the key over all reachable infosets.
struct InfoSetKey {
  Player player = 0;
  std::string key;
  std::vector<double> tensor;
};

// The game state as seen by the offline pipeline: the tuple of every
// player's infoset plus who moves next. `joint` is the concatenation of the
// per-player tensors followed by a current-player one-hot block of size
// n + 1 (players then chance); terminal states leave the block all-zero.
struct StateTuple {
  std::vector<InfoSetKey> per_player_infosets;
  Player current_player = kTerminalPlayer;
  std::vector<double> joint;
};

// Everything a tree walker needs to know about one history.
struct NodeView {
  Player to_move = kTerminalPlayer;
  std::vector<Action> legal;          // ascending; empty iff terminal
  std::vector<double> chance_probs;   // parallel to legal at chance nodes
  std::vector<double> payoffs;        // per player at terminal nodes

  bool IsTerminal() const { return to_move == kTerminalPlayer; }
  bool IsChance() const { return to_move == kChancePlayer; }
};

class Game;

// An immutable action sequence from the root. Histories are cheap values;
// all rules queries delegate to the owning game.
class History {
 public:
  explicit History(const Game* game) : game_(game) {}
  History(const Game* game, std::vector<Action> actions)
      : game_(game), actions_(std::move(actions)) {}

  const Game& game() const { return *game_; }
  const std::vector<Action>& actions() const { return actions_; }
  size_t size() const { return actions_.size(); }

  NodeView View() const;
  Player ToMove() const { return View().to_move; }
  bool IsTerminal() const { return View().IsTerminal(); }

  // Legal actions at a non-terminal history; throws "terminal" otherwise.
  std::vector<Action> LegalActions() const;
  // Child history; throws "illegal-action" if a is not legal here.
  History Child(Action a) const;
  // Per-player utilities at a terminal history; throws "non-terminal".
  std::vector<double> Returns() const;
  // (action, probability) pairs at a chance node; throws "not-chance".
  std::vector<std::pair<Action, double>> ChanceDistribution() const;

  InfoSetKey Infoset(Player p) const;
  StateTuple EncodeState() const;

 private:
  const Game* game_;
  std::vector<Action> actions_;
};

// Extensive-form game interface. Implementations are immutable after
// construction and safe for concurrent read access.
class Game {
 public:
  virtual ~Game() = default;

  const std::string& id() const { return id_; }
  int NumPlayers() const { return num_players_; }
  int MaxActions() const { return max_actions_; }
  int MaxEpisodeLength() const { return max_episode_length_; }
  EncodingDims Dims() const {
    return {per_player_dim_, num_players_ * per_player_dim_ + num_players_ + 1};
  }

  History Root() const { return History(this); }

  // One rules query answering player-to-move / legality / chance /
  // terminal payoffs for the given history.
  virtual NodeView Analyze(std::span<const Action> h) const = 0;

  // Observer view of `h` for player p; defined for every history.
  virtual InfoSetKey Infoset(std::span<const Action> h, Player p) const = 0;

  // Parses one per-player tensor block back into a key. Returns nullopt for
  // tensors that encode no reachable infoset.
  virtual std::optional<InfoSetKey> ParseInfosetTensor(
      Player p, std::span<const double> tensor) const = 0;

  // Rebuilds the unique action sequence whose encoding is `joint`.
  virtual std::optional<std::vector<Action>> Reconstruct(
      std::span<const double> joint) const = 0;

  StateTuple EncodeState(std::span<const Action> h) const;

  // Inverse of EncodeState on valid tensors; throws Error("undecodable")
  // for tensors of the right length that match no state, and
  // Error("bad-length") on length mismatch.
  StateTuple DecodeState(std::span<const double> joint) const;

  // Offset of player p's block inside the joint tensor.
  int InfosetOffset(Player p) const { return p * per_player_dim_; }

  // Current player encoded in a joint tensor's trailing block.
  Player JointTensorPlayer(std::span<const double> joint) const;

 protected:
  Game(std::string id, int num_players, int max_actions, int per_player_dim,
       int max_episode_length)
      : id_(std::move(id)),
        num_players_(num_players),
        max_actions_(max_actions),
        per_player_dim_(per_player_dim),
        max_episode_length_(max_episode_length) {}

  std::string id_;
  int num_players_;
  int max_actions_;
  int per_player_dim_;
  int max_episode_length_;
};

// Factory for the supported game ids: kuhn2..kuhn5, leduc2, leduc3,
// liars2/liars3/liars6 (2-player Liar's Dice with that many die sides),
// and pttt (Phantom Tic-Tac-Toe).
std::shared_ptr<const Game> MakeGame(const std::string& id);

std::vector<std::string> SupportedGameIds();

}  // namespace oef

#endif  // OEF_GAME_HPP_
