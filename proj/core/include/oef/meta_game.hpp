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

#ifndef OEF_META_GAME_HPP_
#define OEF_META_GAME_HPP_

#include <map>
#include <vector>

#include "oef/policy.hpp"

namespace oef {

// Empirical game over the players' policy sets: expected utilities per
// joint profile, filled lazily as the sets grow.
struct MetaGame {
  std::vector<std::vector<Policy>> policies;  // per player
  std::map<std::vector<int>, std::vector<double>> utilities;

  std::vector<int> Shape() const {
    std::vector<int> shape;
    shape.reserve(policies.size());
    for (const auto& set : policies) shape.push_back(static_cast<int>(set.size()));
    return shape;
  }
  int64_t NumProfiles() const {
    int64_t total = 1;
    for (int s : Shape()) total *= s;
    return total;
  }
  bool Filled() const { return static_cast<int64_t>(utilities.size()) == NumProfiles(); }
  const std::vector<double>& UtilityOf(const std::vector<int>& profile) const {
    auto it = utilities.find(profile);
    Check(it != utilities.end(), "meta: unfilled entry");
    return it->second;
  }
};

// Distribution over each player's policy set.
using MetaStrategy = std::vector<std::vector<double>>;

enum class MetaSolverKind { kUniform, kMatrixNash2p0s, kAlphaRank };

std::string MetaSolverName(MetaSolverKind kind);
MetaSolverKind MetaSolverFromName(const std::string& name);

// Enumerates profile index vectors in odometer order (first index fastest).
std::vector<std::vector<int>> AllProfiles(const std::vector<int>& shape);

// uniform: uniform over each set. matrix_nash_2p0s: regret-matching
// self-play on the payoff matrix to exploitability < 1e-3. alpha_rank:
// marginals of the stationary distribution of the response-graph chain,
// selection intensity chosen as the largest value keeping the chain
// numerically irreducible.
MetaStrategy MetaSolve(const MetaGame& meta, MetaSolverKind kind);

struct AlphaRankResult {
  double alpha = 0;
  std::vector<double> stationary;  // over AllProfiles order
  MetaStrategy marginals;
};

AlphaRankResult AlphaRank(const MetaGame& meta, int population_size = 50);

// Exploitability of a mixed profile of the matrix game (2p zero-sum).
double MatrixExploitability(const MetaGame& meta, const MetaStrategy& sigma);

}  // namespace oef

#endif  // OEF_META_GAME_HPP_
