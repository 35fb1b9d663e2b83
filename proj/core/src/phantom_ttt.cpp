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
#include <array>

#include "oef/games.hpp"

namespace oef {

namespace {

constexpr std::array<std::array<int, 3>, 8> kLines = {{{0, 1, 2},
                                                       {3, 4, 5},
                                                       {6, 7, 8},
                                                       {0, 3, 6},
                                                       {1, 4, 7},
                                                       {2, 5, 8},
                                                       {0, 4, 8},
                                                       {2, 4, 6}}};

bool HasLine(const std::array<int, 9>& board, Player p) {
  for (const auto& line : kLines) {
    if (board[line[0]] == p && board[line[1]] == p && board[line[2]] == p) {
      return true;
    }
  }
  return false;
}

}  // namespace

struct PhantomTttGame::Parsed {
  std::array<int, 9> board;  // -1 empty, else owner
  struct Attempt {
    int cell;
    bool placed;
  };
  std::array<std::vector<Attempt>, 2> attempts;
  Player current = 0;
  Player winner = -1;
  bool terminal = false;
  int placements = 0;
};

PhantomTttGame::PhantomTttGame()
    : Game("pttt", /*num_players=*/2, /*max_actions=*/kCells,
           /*per_player_dim=*/kMaxAttempts * (kCells + 1),
           /*max_episode_length=*/2 * kMaxAttempts - 1) {}

PhantomTttGame::Parsed PhantomTttGame::Parse(std::span<const Action> h) const {
  Parsed st;
  st.board.fill(-1);
  for (Action a : h) {
    Check(a >= 0 && a < kCells, "pttt: bad cell");
    Check(!st.terminal, "pttt: action after terminal");
    Player p = st.current;
    Check(st.board[a] != p, "pttt: revisiting own cell");
    bool occupied = st.board[a] >= 0;
    for (const auto& at : st.attempts[p]) {
      Check(at.cell != a, "pttt: repeated attempt");
    }
    if (occupied) {
      // Blocked: the cell is revealed to the mover, who tries again.
      st.attempts[p].push_back({a, false});
    } else {
      st.board[a] = p;
      st.attempts[p].push_back({a, true});
      ++st.placements;
      if (HasLine(st.board, p)) {
        st.terminal = true;
        st.winner = p;
      } else if (st.placements == kCells) {
        st.terminal = true;
      } else {
        st.current = 1 - p;
      }
    }
  }
  return st;
}

NodeView PhantomTttGame::Analyze(std::span<const Action> h) const {
  Parsed st = Parse(h);
  NodeView v;
  if (st.terminal) {
    v.to_move = kTerminalPlayer;
    v.payoffs.assign(2, 0.0);
    if (st.winner >= 0) {
      v.payoffs[st.winner] = 1.0;
      v.payoffs[1 - st.winner] = -1.0;
    }
    return v;
  }
  v.to_move = st.current;
  for (int c = 0; c < kCells; ++c) {
    bool known = false;
    for (const auto& at : st.attempts[st.current]) known |= at.cell == c;
    if (!known) v.legal.push_back(c);
  }
  return v;
}

InfoSetKey PhantomTttGame::Infoset(std::span<const Action> h, Player p) const {
  Check(p >= 0 && p < 2, "pttt: bad player");
  Parsed st = Parse(h);
  InfoSetKey key;
  key.player = p;
  key.key = "P" + std::to_string(p) + "|";
  key.tensor.assign(per_player_dim_, 0.0);
  for (size_t t = 0; t < st.attempts[p].size(); ++t) {
    const auto& at = st.attempts[p][t];
    key.key += static_cast<char>('0' + at.cell);
    key.key += at.placed ? '+' : 'x';
    int base = static_cast<int>(t) * (kCells + 1);
    key.tensor[base + at.cell] = 1.0;
    if (at.placed) key.tensor[base + kCells] = 1.0;
  }
  return key;
}

std::optional<InfoSetKey> PhantomTttGame::ParseInfosetTensor(
    Player p, std::span<const double> tensor) const {
  if (p < 0 || p >= 2) return std::nullopt;
  if (static_cast<int>(tensor.size()) != per_player_dim_) return std::nullopt;
  for (double x : tensor) {
    if (x != 0.0 && x != 1.0) return std::nullopt;
  }
  std::string key_str = "P" + std::to_string(p) + "|";
  std::array<bool, 9> seen{};
  bool ended = false;
  int placements = 0, blocks = 0;
  for (int t = 0; t < kMaxAttempts; ++t) {
    int base = t * (kCells + 1);
    int cell = -1;
    for (int c = 0; c < kCells; ++c) {
      if (tensor[base + c] == 1.0) {
        if (cell >= 0) return std::nullopt;
        cell = c;
      }
    }
    bool placed = tensor[base + kCells] == 1.0;
    if (cell < 0) {
      if (placed) return std::nullopt;
      ended = true;
      continue;
    }
    if (ended || seen[cell]) return std::nullopt;
    seen[cell] = true;
    placed ? ++placements : ++blocks;
    key_str += static_cast<char>('0' + cell);
    key_str += placed ? '+' : 'x';
  }
  if (placements > 5 || blocks > 4) return std::nullopt;
  InfoSetKey key;
  key.player = p;
  key.key = std::move(key_str);
  key.tensor.assign(tensor.begin(), tensor.end());
  return key;
}

std::optional<std::vector<Action>> PhantomTttGame::Reconstruct(
    std::span<const double> joint) const {
  if (static_cast<int>(joint.size()) != Dims().joint) return std::nullopt;
  std::array<std::vector<Parsed::Attempt>, 2> attempts;
  for (Player p = 0; p < 2; ++p) {
    std::span<const double> block = joint.subspan(InfosetOffset(p), per_player_dim_);
    if (!ParseInfosetTensor(p, block).has_value()) return std::nullopt;
    for (int t = 0; t < kMaxAttempts; ++t) {
      int base = t * (kCells + 1);
      for (int c = 0; c < kCells; ++c) {
        if (block[base + c] == 1.0) {
          attempts[p].push_back({c, block[base + kCells] == 1.0});
        }
      }
    }
  }
  // The interleaving is forced: a blocked attempt keeps the turn, a
  // placement passes it. Replay both attempt lists against a board.
  std::array<int, 9> board;
  board.fill(-1);
  std::array<size_t, 2> next{0, 0};
  Player current = 0;
  std::vector<Action> actions;
  int placements = 0;
  bool game_over = false;
  while (next[0] < attempts[0].size() || next[1] < attempts[1].size()) {
    if (game_over) return std::nullopt;  // attempts after the game ended
    if (next[current] >= attempts[current].size()) return std::nullopt;
    const auto& at = attempts[current][next[current]++];
    actions.push_back(at.cell);
    if (at.placed) {
      if (board[at.cell] != -1) return std::nullopt;
      board[at.cell] = current;
      ++placements;
      if (HasLine(board, current) || placements == kCells) {
        game_over = true;
      } else {
        current = 1 - current;
      }
    } else {
      if (board[at.cell] != 1 - current) return std::nullopt;
    }
  }
  return actions;
}

}  // namespace oef
