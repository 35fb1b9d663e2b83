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
//
// A 2-player zero-sum matrix game embedded as a tree: player 0 picks a row,
// player 1 picks a column without observing the row; both moves are
// revealed at the terminal. Test-only.

#ifndef OEF_TESTS_MATRIX_GAME_HPP_
#define OEF_TESTS_MATRIX_GAME_HPP_

#include <numeric>
#include <vector>

#include "oef/game.hpp"

namespace oef {

class MatrixGame : public Game {
 public:
  explicit MatrixGame(std::vector<std::vector<double>> row_payoffs)
      : Game("matrix", 2, /*max_actions=*/0, /*per_player_dim=*/0,
             /*max_episode_length=*/2),
        payoffs_(std::move(row_payoffs)),
        rows_(static_cast<int>(payoffs_.size())),
        cols_(static_cast<int>(payoffs_[0].size())) {
    max_actions_ = std::max(rows_, cols_);
    per_player_dim_ = rows_ + cols_;
  }

  NodeView Analyze(std::span<const Action> h) const override {
    NodeView v;
    if (h.size() == 0) {
      v.to_move = 0;
      v.legal.resize(rows_);
      std::iota(v.legal.begin(), v.legal.end(), 0);
    } else if (h.size() == 1) {
      v.to_move = 1;
      v.legal.resize(cols_);
      std::iota(v.legal.begin(), v.legal.end(), 0);
    } else {
      double u = payoffs_[h[0]][h[1]];
      v.payoffs = {u, -u};
    }
    return v;
  }

  InfoSetKey Infoset(std::span<const Action> h, Player p) const override {
    InfoSetKey key;
    key.player = p;
    key.key = "P" + std::to_string(p) + "|";
    key.tensor.assign(per_player_dim_, 0.0);
    bool terminal = h.size() >= 2;
    // Own move is always visible; the opponent's only at the showdown.
    if (p == 0 || terminal) {
      if (h.size() >= 1) {
        key.key += "r" + std::to_string(h[0]);
        key.tensor[h[0]] = 1.0;
      }
    }
    if (p == 1 || terminal) {
      if (h.size() >= 2) {
        key.key += "c" + std::to_string(h[1]);
        key.tensor[rows_ + h[1]] = 1.0;
      }
    }
    return key;
  }

  std::optional<InfoSetKey> ParseInfosetTensor(
      Player, std::span<const double>) const override {
    return std::nullopt;
  }
  std::optional<std::vector<Action>> Reconstruct(
      std::span<const double>) const override {
    return std::nullopt;
  }

 private:
  std::vector<std::vector<double>> payoffs_;
  int rows_, cols_;
};

}  // namespace oef

#endif  // OEF_TESTS_MATRIX_GAME_HPP_
