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

#include "oef/meta_game.hpp"

#include <cmath>
#include <queue>

#include "oef/solvers.hpp"

namespace oef {

std::string MetaSolverName(MetaSolverKind kind) {
  switch (kind) {
    case MetaSolverKind::kUniform: return "uniform";
    case MetaSolverKind::kMatrixNash2p0s: return "matrix_nash_2p0s";
    case MetaSolverKind::kAlphaRank: return "alpha_rank";
  }
  Fatal("meta: bad solver kind");
}

MetaSolverKind MetaSolverFromName(const std::string& name) {
  if (name == "uniform") return MetaSolverKind::kUniform;
  if (name == "matrix_nash_2p0s") return MetaSolverKind::kMatrixNash2p0s;
  if (name == "alpha_rank") return MetaSolverKind::kAlphaRank;
  Fatal("meta: unknown solver '" + name + "'");
}

std::vector<std::vector<int>> AllProfiles(const std::vector<int>& shape) {
  std::vector<std::vector<int>> out;
  std::vector<int> profile(shape.size(), 0);
  for (;;) {
    out.push_back(profile);
    size_t d = 0;
    while (d < shape.size() && ++profile[d] == shape[d]) {
      profile[d] = 0;
      ++d;
    }
    if (d == shape.size()) break;
  }
  return out;
}

namespace {

MetaStrategy UniformMeta(const MetaGame& meta) {
  MetaStrategy sigma;
  for (int s : meta.Shape()) {
    sigma.emplace_back(s, 1.0 / static_cast<double>(s));
  }
  return sigma;
}

MetaStrategy MatrixNash(const MetaGame& meta) {
  std::vector<int> shape = meta.Shape();
  Check(shape.size() == 2, "meta: matrix solver needs two players");
  const int rows = shape[0], cols = shape[1];
  std::vector<std::vector<double>> a(rows, std::vector<double>(cols));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) a[r][c] = meta.UtilityOf({r, c})[0];
  }

  std::vector<double> regret0(rows, 0.0), regret1(cols, 0.0);
  std::vector<double> avg0(rows, 0.0), avg1(cols, 0.0);
  auto normalized = [](std::vector<double> v) {
    double total = 0;
    for (double x : v) total += x;
    for (double& x : v) x /= total;
    return v;
  };
  const int64_t max_iters = 4000000;
  for (int64_t t = 1; t <= max_iters; ++t) {
    std::vector<double> s0 = RegretMatching(regret0);
    std::vector<double> s1 = RegretMatching(regret1);
    for (int r = 0; r < rows; ++r) avg0[r] += s0[r];
    for (int c = 0; c < cols; ++c) avg1[c] += s1[c];

    std::vector<double> row_values(rows, 0.0), col_values(cols, 0.0);
    double value = 0;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        row_values[r] += a[r][c] * s1[c];
        col_values[c] += a[r][c] * s0[r];
      }
      value += s0[r] * row_values[r];
    }
    for (int r = 0; r < rows; ++r) regret0[r] += row_values[r] - value;
    for (int c = 0; c < cols; ++c) regret1[c] += value - col_values[c];

    if (t % 1000 == 0 || t == max_iters) {
      MetaStrategy sigma = {normalized(avg0), normalized(avg1)};
      if (MatrixExploitability(meta, sigma) < 1e-3) return sigma;
    }
  }
  return {normalized(avg0), normalized(avg1)};
}

// Fixation probability of a mutant with payoff advantage `delta` under
// logistic selection with intensity alpha and population size m.
double FixationProb(double alpha, int m, double delta) {
  double x = alpha * delta;
  if (std::abs(x) < 1e-12) return 1.0 / m;
  if (x > 0) {
    return std::expm1(-x) / std::expm1(-static_cast<double>(m) * x);
  }
  // x < 0: (e^y - 1) / (e^{my} - 1) with y = -x, evaluated in log space.
  double y = -x;
  double log_num = y > 700 ? y : std::log(std::expm1(y));
  double my = static_cast<double>(m) * y;
  double log_den = my > 700 ? my : std::log(std::expm1(my));
  double log_rho = log_num - log_den;
  return log_rho < -745 ? 0.0 : std::exp(log_rho);
}

struct Chain {
  // edges[from] = (to, probability); self-loops implicit.
  std::vector<std::vector<std::pair<int, double>>> edges;
};

Chain BuildChain(const MetaGame& meta,
                 const std::vector<std::vector<int>>& profiles, double alpha,
                 int m) {
  std::vector<int> shape = meta.Shape();
  std::map<std::vector<int>, int> index;
  for (size_t i = 0; i < profiles.size(); ++i) {
    index[profiles[i]] = static_cast<int>(i);
  }

  int mutation_slots = 0;
  for (int s : shape) mutation_slots += std::max(0, s - 1);
  double eta = mutation_slots > 0 ? 1.0 / mutation_slots : 0.0;

  Chain chain;
  chain.edges.resize(profiles.size());
  for (size_t i = 0; i < profiles.size(); ++i) {
    const std::vector<int>& sigma = profiles[i];
    for (size_t player = 0; player < shape.size(); ++player) {
      for (int tau = 0; tau < shape[player]; ++tau) {
        if (tau == sigma[player]) continue;
        std::vector<int> next = sigma;
        next[player] = tau;
        double delta =
            meta.UtilityOf(next)[player] - meta.UtilityOf(sigma)[player];
        double rho = FixationProb(alpha, m, delta);
        if (rho > 0) chain.edges[i].push_back({index.at(next), eta * rho});
      }
    }
  }
  return chain;
}

bool StronglyConnected(const Chain& chain) {
  const int n = static_cast<int>(chain.edges.size());
  if (n <= 1) return true;
  std::vector<std::vector<int>> fwd(n), rev(n);
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, p] : chain.edges[i]) {
      if (p > 1e-14) {
        fwd[i].push_back(j);
        rev[j].push_back(i);
      }
    }
  }
  auto covers_all = [n](const std::vector<std::vector<int>>& adj) {
    std::vector<bool> seen(n, false);
    std::queue<int> queue;
    queue.push(0);
    seen[0] = true;
    int count = 1;
    while (!queue.empty()) {
      int at = queue.front();
      queue.pop();
      for (int next : adj[at]) {
        if (!seen[next]) {
          seen[next] = true;
          ++count;
          queue.push(next);
        }
      }
    }
    return count == n;
  };
  return covers_all(fwd) && covers_all(rev);
}

std::vector<double> StationaryDistribution(const Chain& chain) {
  const size_t n = chain.edges.size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
  for (int iter = 0; iter < 200000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (size_t i = 0; i < n; ++i) {
      double out = 0;
      for (const auto& [j, p] : chain.edges[i]) {
        next[j] += pi[i] * p;
        out += p;
      }
      next[i] += pi[i] * (1.0 - out);  // self-loop mass
    }
    double diff = 0;
    for (size_t i = 0; i < n; ++i) diff += std::abs(next[i] - pi[i]);
    pi.swap(next);
    if (diff < 1e-13) break;
  }
  return pi;
}

}  // namespace

double MatrixExploitability(const MetaGame& meta, const MetaStrategy& sigma) {
  std::vector<int> shape = meta.Shape();
  const int rows = shape[0], cols = shape[1];
  double value = 0;
  std::vector<double> row_values(rows, 0.0), col_values(cols, 0.0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double u = meta.UtilityOf({r, c})[0];
      row_values[r] += u * sigma[1][c];
      col_values[c] += u * sigma[0][r];
      value += u * sigma[0][r] * sigma[1][c];
    }
  }
  double best_row = *std::max_element(row_values.begin(), row_values.end());
  double best_col = *std::min_element(col_values.begin(), col_values.end());
  return (best_row - value) + (value - best_col);
}

AlphaRankResult AlphaRank(const MetaGame& meta, int population_size) {
  Check(meta.Filled(), "meta: unfilled entries");
  std::vector<std::vector<int>> profiles = AllProfiles(meta.Shape());

  AlphaRankResult result;
  if (profiles.size() == 1) {
    result.alpha = 0;
    result.stationary = {1.0};
    for (int s : meta.Shape()) result.marginals.emplace_back(s, 1.0);
    return result;
  }

  // Selection-intensity sweep: double alpha while the response chain stays
  // numerically irreducible; keep the largest such value.
  double alpha = 0.01;
  Chain best_chain = BuildChain(meta, profiles, alpha, population_size);
  Check(StronglyConnected(best_chain), "meta: reducible chain at minimal alpha");
  for (int step = 0; step < 40; ++step) {
    double trial = alpha * 2.0;
    Chain chain = BuildChain(meta, profiles, trial, population_size);
    if (!StronglyConnected(chain)) break;
    alpha = trial;
    best_chain = std::move(chain);
  }

  result.alpha = alpha;
  result.stationary = StationaryDistribution(best_chain);
  std::vector<int> shape = meta.Shape();
  for (int s : shape) result.marginals.emplace_back(s, 0.0);
  for (size_t i = 0; i < profiles.size(); ++i) {
    for (size_t p = 0; p < shape.size(); ++p) {
      result.marginals[p][profiles[i][p]] += result.stationary[i];
    }
  }
  return result;
}

MetaStrategy MetaSolve(const MetaGame& meta, MetaSolverKind kind) {
  Check(meta.Filled(), "meta: unfilled entries");
  switch (kind) {
    case MetaSolverKind::kUniform:
      return UniformMeta(meta);
    case MetaSolverKind::kMatrixNash2p0s:
      return MatrixNash(meta);
    case MetaSolverKind::kAlphaRank:
      return AlphaRank(meta).marginals;
  }
  Fatal("meta: bad solver kind");
}

}  // namespace oef
