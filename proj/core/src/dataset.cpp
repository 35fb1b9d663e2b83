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

#include "oef/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include <json.hpp>

#include "oef/rng.hpp"
#include "oef/solvers.hpp"

namespace oef {

namespace {

using nlohmann::ordered_json;

std::vector<uint8_t> ZeroMask(int max_actions) {
  return std::vector<uint8_t>(max_actions, 0);
}

TransitionRecord MakeRecord(const Game& game, int64_t episode, int64_t step,
                            const History& parent, const NodeView& pv,
                            Action a, const History& child,
                            const NodeView& cv) {
  TransitionRecord rec;
  rec.episode = episode;
  rec.step = step;
  rec.actor = pv.IsChance() ? -1 : pv.to_move;
  rec.state = game.EncodeState(parent.actions()).joint;
  rec.action = a;
  rec.legal_mask = MaskFromLegal(pv.legal, game.MaxActions());
  rec.next_state = game.EncodeState(child.actions()).joint;
  rec.terminal = cv.IsTerminal();
  rec.rewards = rec.terminal ? cv.payoffs
                             : std::vector<double>(game.NumPlayers(), 0.0);
  rec.next_legal_mask = rec.terminal ? ZeroMask(game.MaxActions())
                                     : MaskFromLegal(cv.legal, game.MaxActions());
  return rec;
}

// One full episode under `strategy`, all transitions logged.
std::vector<TransitionRecord> PlayEpisode(const Game& game,
                                          const StrategyFn& strategy,
                                          int64_t episode, uint64_t seed) {
  Rng rng(seed);
  std::vector<TransitionRecord> records;
  History h = game.Root();
  NodeView view = h.View();
  int64_t step = 0;
  while (!view.IsTerminal()) {
    Action a;
    if (view.IsChance()) {
      a = view.legal[rng.SampleIndex(view.chance_probs)];
    } else {
      std::vector<double> probs = strategy(h.Infoset(view.to_move), view.legal);
      a = view.legal[rng.SampleIndex(probs)];
    }
    History child = h.Child(a);
    NodeView child_view = child.View();
    records.push_back(MakeRecord(game, episode, step++, h, view, a, child,
                                 child_view));
    h = std::move(child);
    view = std::move(child_view);
  }
  return records;
}

}  // namespace

Dataset GenerateFromStrategy(const Game& game, const StrategyFn& strategy,
                             const std::string& kind, int64_t num_records,
                             uint64_t seed, int workers) {
  Check(num_records > 0, "dataset: num_records must be positive");
  Dataset ds;
  ds.meta.game_id = game.id();
  ds.meta.kind = kind;
  ds.meta.size = num_records;
  ds.meta.seed = seed;
  workers = std::max(workers, 1);

  int64_t next_episode = 0;
  while (static_cast<int64_t>(ds.records.size()) < num_records) {
    // Per-episode derived seeds keep output identical for any worker count.
    int batch = workers * 4;
    std::vector<std::future<std::vector<TransitionRecord>>> futures;
    futures.reserve(batch);
    for (int b = 0; b < batch; ++b) {
      int64_t episode = next_episode + b;
      futures.push_back(std::async(
          workers > 1 ? std::launch::async : std::launch::deferred,
          [&game, &strategy, episode, seed] {
            return PlayEpisode(game, strategy, episode,
                               DeriveSeed(seed, static_cast<uint64_t>(episode)));
          }));
    }
    for (auto& f : futures) {
      std::vector<TransitionRecord> episode_records = f.get();
      if (static_cast<int64_t>(ds.records.size()) < num_records) {
        ds.records.insert(ds.records.end(), episode_records.begin(),
                          episode_records.end());
      }
    }
    next_episode += batch;
  }
  ds.records.resize(num_records);  // partial final episode is kept
  return ds;
}

std::vector<uint8_t> MaskFromLegal(const std::vector<Action>& legal,
                                   int max_actions) {
  std::vector<uint8_t> mask(max_actions, 0);
  for (Action a : legal) {
    Check(a >= 0 && a < max_actions, "mask: action out of range");
    mask[a] = 1;
  }
  return mask;
}

Dataset GenerateRandom(const Game& game, int64_t num_records, uint64_t seed,
                       int workers) {
  return GenerateFromStrategy(game, UniformStrategy(), "random", num_records, seed,
                          workers);
}

Dataset GenerateExpert(const Game& game, int64_t num_records, uint64_t seed,
                       const Profile& ne_profile, double nash_conv_threshold,
                       int workers) {
  double conv = NashConv(game, ne_profile).nash_conv;
  if (conv > nash_conv_threshold) {
    Fatal("not-expert: profile NashConv " + std::to_string(conv) +
          " above threshold " + std::to_string(nash_conv_threshold));
  }
  return GenerateFromStrategy(game, ProfileStrategy(ne_profile), "expert",
                          num_records, seed, workers);
}

Dataset GenerateLearning(const Game& game, int64_t num_records, uint64_t seed) {
  Check(num_records > 0, "dataset: num_records must be positive");
  Dataset ds;
  ds.meta.game_id = game.id();
  ds.meta.kind = "learning";
  ds.meta.size = num_records;
  ds.meta.seed = seed;

  RegretTable table(game.NumPlayers());
  Rng rng(DeriveSeed(seed, 0x11));
  int64_t traversal = 0;
  while (static_cast<int64_t>(ds.records.size()) < num_records) {
    int64_t step = 0;
    StepLogger logger = [&](const History& parent, const NodeView& pv, Action a,
                            const History& child, const NodeView& cv) {
      ds.records.push_back(MakeRecord(game, traversal, step++, parent, pv, a,
                                      child, cv));
    };
    // The record budget only cuts off logging; the traversal itself always
    // completes so the logged play reflects a genuine training run.
    ExternalSamplingTraverse(game, static_cast<Player>(traversal % game.NumPlayers()),
                             table, rng, &logger);
    ++traversal;
  }
  ds.records.resize(num_records);
  return ds;
}

Dataset MixHybrid(const Dataset& random_ds, const Dataset& expert_ds,
                  double rho, int64_t target_size, uint64_t seed) {
  Check(rho >= 0.0 && rho <= 1.0, "hybrid: rho must be in [0,1]");
  Check(target_size > 0, "hybrid: target_size must be positive");
  Check(random_ds.meta.game_id == expert_ds.meta.game_id,
        "hybrid: mixing datasets from different games");
  int64_t from_random = std::llround(rho * static_cast<double>(target_size));
  int64_t from_expert = target_size - from_random;
  if (from_random > static_cast<int64_t>(random_ds.records.size()) ||
      from_expert > static_cast<int64_t>(expert_ds.records.size())) {
    Fatal("insufficient-source: need " + std::to_string(from_random) + "+" +
          std::to_string(from_expert) + " records");
  }

  Rng rng(DeriveSeed(seed, 0x22));
  auto sample_indices = [&rng](int64_t population, int64_t k) {
    std::vector<int64_t> idx(population);
    for (int64_t i = 0; i < population; ++i) idx[i] = i;
    for (int64_t i = 0; i < k; ++i) {
      int64_t j = i + static_cast<int64_t>(rng.UniformBelow(population - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
  };

  Dataset out;
  out.meta.game_id = random_ds.meta.game_id;
  out.meta.kind = "hybrid";
  out.meta.rho = rho;
  out.meta.size = target_size;
  out.meta.seed = seed;

  std::map<std::pair<int, int64_t>, int64_t> episode_map;
  auto append = [&](const Dataset& src, const std::vector<int64_t>& idx,
                    int source) {
    for (int64_t i : idx) {
      TransitionRecord rec = src.records[i];
      auto [it, inserted] = episode_map.try_emplace(
          {source, rec.episode}, static_cast<int64_t>(episode_map.size()));
      rec.episode = it->second;
      out.records.push_back(std::move(rec));
    }
  };
  append(random_ds, sample_indices(random_ds.records.size(), from_random), 0);
  append(expert_ds, sample_indices(expert_ds.records.size(), from_expert), 1);
  rng.Shuffle(out.records);
  return out;
}

namespace {

ordered_json RecordToJson(const TransitionRecord& rec) {
  auto bits = [](const std::vector<double>& v) {
    std::vector<int> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] == 1.0 ? 1 : 0;
    return out;
  };
  ordered_json j;
  j["episode"] = rec.episode;
  j["step"] = rec.step;
  j["actor"] = rec.actor;
  j["state"] = bits(rec.state);
  j["action"] = rec.action;
  j["legal_mask"] = std::vector<int>(rec.legal_mask.begin(), rec.legal_mask.end());
  j["next_state"] = bits(rec.next_state);
  j["rewards"] = rec.rewards;
  j["terminal"] = rec.terminal;
  j["next_legal_mask"] =
      std::vector<int>(rec.next_legal_mask.begin(), rec.next_legal_mask.end());
  return j;
}

const std::vector<std::string>& RecordFields() {
  static const std::vector<std::string> fields = {
      "episode", "step",    "actor",   "state",    "action",
      "legal_mask", "next_state", "rewards", "terminal", "next_legal_mask"};
  return fields;
}

}  // namespace

void SaveDataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  Check(out.good(), "dataset: cannot write " + path);
  ordered_json meta;
  meta["game"] = dataset.meta.game_id;
  meta["kind"] = dataset.meta.kind;
  if (dataset.meta.kind == "hybrid") meta["rho"] = dataset.meta.rho;
  meta["size"] = dataset.meta.size;
  meta["seed"] = dataset.meta.seed;
  meta["generator_version"] = dataset.meta.generator_version;
  out << "#META " << meta.dump() << "\n";
  for (const TransitionRecord& rec : dataset.records) {
    out << RecordToJson(rec).dump() << "\n";
  }
  Check(out.good(), "dataset: write failure on " + path);
}

Dataset LoadDataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Check(in.good(), "dataset: cannot read " + path);
  std::string line;
  Check(static_cast<bool>(std::getline(in, line)), "dataset: empty file");
  Check(line.rfind("#META ", 0) == 0, "dataset: missing #META header");

  Dataset ds;
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(line.substr(6));
  } catch (const std::exception& e) {
    Fatal("parse-error line 1: " + std::string(e.what()));
  }
  ds.meta.game_id = meta.at("game").get<std::string>();
  ds.meta.kind = meta.at("kind").get<std::string>();
  ds.meta.rho = meta.value("rho", 0.0);
  ds.meta.size = meta.at("size").get<int64_t>();
  ds.meta.seed = meta.at("seed").get<uint64_t>();
  ds.meta.generator_version = meta.at("generator_version").get<int>();

  int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      Fatal("parse-error line " + std::to_string(line_no) + ": " + e.what());
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (std::find(RecordFields().begin(), RecordFields().end(), it.key()) ==
          RecordFields().end()) {
        Fatal("unknown-field: '" + it.key() + "' line " + std::to_string(line_no));
      }
    }
    for (const std::string& field : RecordFields()) {
      if (!j.contains(field)) {
        Fatal("missing-field: '" + field + "' line " + std::to_string(line_no));
      }
    }
    TransitionRecord rec;
    rec.episode = j["episode"].get<int64_t>();
    rec.step = j["step"].get<int64_t>();
    rec.actor = j["actor"].get<int>();
    auto to_doubles = [](const nlohmann::json& arr) {
      std::vector<double> out;
      for (const auto& x : arr) out.push_back(x.get<double>());
      return out;
    };
    rec.state = to_doubles(j["state"]);
    rec.action = j["action"].get<Action>();
    for (const auto& x : j["legal_mask"]) rec.legal_mask.push_back(x.get<int>() != 0);
    rec.next_state = to_doubles(j["next_state"]);
    rec.rewards = to_doubles(j["rewards"]);
    rec.terminal = j["terminal"].get<bool>();
    for (const auto& x : j["next_legal_mask"]) {
      rec.next_legal_mask.push_back(x.get<int>() != 0);
    }
    ds.records.push_back(std::move(rec));
  }
  if (static_cast<int64_t>(ds.records.size()) != ds.meta.size) {
    Fatal("size-mismatch: meta says " + std::to_string(ds.meta.size) +
          ", found " + std::to_string(ds.records.size()));
  }
  return ds;
}

void ValidateDataset(const Game& game, const Dataset& dataset) {
  std::set<std::pair<int64_t, int64_t>> ids;
  for (size_t i = 0; i < dataset.records.size(); ++i) {
    const TransitionRecord& rec = dataset.records[i];
    const std::string where = " (record " + std::to_string(i) + ")";
    Check(ids.insert({rec.episode, rec.step}).second,
          "dataset: duplicate (episode, step)" + where);
    Check(rec.action >= 0 && rec.action < game.MaxActions(),
          "dataset: action out of range" + where);
    Check(static_cast<int>(rec.legal_mask.size()) == game.MaxActions() &&
              rec.legal_mask[rec.action] == 1,
          "dataset: action not legal" + where);
    if (!rec.terminal) {
      for (double r : rec.rewards) {
        Check(r == 0.0, "dataset: nonzero reward before terminal" + where);
      }
    }
    // Replay through the engine from the decoded state.
    auto actions = game.Reconstruct(rec.state);
    Check(actions.has_value(), "dataset: undecodable state" + where);
    History h(&game, *actions);
    NodeView view = h.View();
    Check(MaskFromLegal(view.legal, game.MaxActions()) == rec.legal_mask,
          "dataset: legal mask mismatch" + where);
    History child = h.Child(rec.action);
    NodeView child_view = child.View();
    Check(game.EncodeState(child.actions()).joint == rec.next_state,
          "dataset: next state mismatch" + where);
    Check(child_view.IsTerminal() == rec.terminal,
          "dataset: terminal flag mismatch" + where);
    if (rec.terminal) {
      Check(child_view.payoffs == rec.rewards, "dataset: rewards mismatch" + where);
      Check(rec.next_legal_mask == ZeroMask(game.MaxActions()),
            "dataset: terminal next mask not empty" + where);
    } else {
      Check(MaskFromLegal(child_view.legal, game.MaxActions()) ==
                rec.next_legal_mask,
            "dataset: next legal mask mismatch" + where);
    }
  }
  Check(static_cast<int64_t>(dataset.records.size()) == dataset.meta.size,
        "dataset: size mismatch with meta");
}

}  // namespace oef
