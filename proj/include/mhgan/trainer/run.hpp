// Copyright 2026 The mhgan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MHGAN_TRAINER_RUN_HPP_
#define MHGAN_TRAINER_RUN_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mhgan/datapipe/dataset.hpp"
#include "mhgan/datapipe/kmeans.hpp"
#include "mhgan/errors.hpp"
#include "mhgan/networks/agents.hpp"
#include "mhgan/numcore/checkpoint.hpp"
#include "mhgan/numcore/random.hpp"
#include "mhgan/trainer/config.hpp"
#include "mhgan/trainer/trainer.hpp"

namespace mhgan {

// Normalized data, its clustering and the per-head training partitions.
struct PreparedData {
  Dataset normalized;
  ClusteringResult clustering;
  TrainingData training;
  std::vector<std::string> warnings;

  std::vector<std::size_t> cluster_sizes() const { return clustering.cluster_sizes(); }
};

inline TrainingData training_data(const Dataset& normalized,
                                  const ClusteringResult& clustering) {
  TrainingData t;
  t.sensitive_index = normalized.sensitive_index;
  for (auto& p : partition(normalized, clustering)) t.partitions.push_back(std::move(p.data.rows));
  return t;
}

inline PreparedData prepare_data(const Dataset& raw, const TrainConfig& cfg) {
  PreparedData p;
  p.normalized = normalize(raw, &p.warnings);
  const Tensor& rows = p.normalized.rows;
  const std::uint64_t seed = derive_seed(cfg.seed, 3);
  if (cfg.k > 0) {
    p.clustering = kmeans(rows, cfg.k, seed);
    p.clustering.inertia_curve = {{cfg.k, p.clustering.inertia}};
  } else {
    const std::size_t k_max = std::min(cfg.k_max, rows.rows());
    if (k_max < 2) {
      p.clustering = kmeans(rows, 1, seed);
      p.clustering.inertia_curve = {{1, p.clustering.inertia}};
    } else {
      ElbowResult e = select_k_elbow(rows, k_max, cfg.elbow_threshold, seed);
      p.clustering = e.selected();
    }
  }
  p.training = training_data(p.normalized, p.clustering);
  return p;
}

// Everything a training run produces.
struct TrainedModel {
  Agents agents;
  TrainingState state;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

inline TrainedModel train_model(const TrainingData& data, const TrainConfig& cfg,
                                const EpochCallback& on_epoch = {}) {
  validate(cfg);
  TrainedModel m;
  m.agents = build_agents(cfg, data);
  m.state = init_state(cfg, m.agents);
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    train_epoch(m.state, m.agents, data, cfg);
    if (on_epoch) on_epoch(m.state.history.back());
  }
  return m;
}

// Draws a head per row in proportion to cluster size, then generates each
// head's rows from fresh noise. Output is on the unit scale.
inline Tensor generate_rows(const GeneratorParams& gen,
                            const std::vector<std::size_t>& cluster_sizes,
                            std::size_t n_rows, std::uint64_t seed,
                            std::vector<std::size_t>* head_of_row = nullptr) {
  if (cluster_sizes.size() != gen.n_heads()) {
    throw DimensionError("generate_rows: " + std::to_string(cluster_sizes.size()) +
                         " cluster sizes for " + std::to_string(gen.n_heads()) + " heads");
  }
  Rng rng(derive_seed(seed, 0x6E4));
  std::discrete_distribution<std::size_t> pick(cluster_sizes.begin(), cluster_sizes.end());
  std::vector<std::size_t> heads(n_rows);
  std::vector<std::size_t> counts(gen.n_heads(), 0);
  for (auto& h : heads) {
    h = pick(rng);
    ++counts[h];
  }
  Tensor out = Tensor::matrix(n_rows, gen.out_features);
  std::vector<std::size_t> cursor(gen.n_heads(), 0);
  std::vector<Tensor> per_head(gen.n_heads());
  for (std::size_t h = 0; h < gen.n_heads(); ++h) {
    if (counts[h] == 0) continue;
    per_head[h] = generate_head(gen, h, normal_matrix(rng, counts[h], gen.noise_dim));
  }
  for (std::size_t r = 0; r < n_rows; ++r) {
    const std::size_t h = heads[r];
    auto src = per_head[h].row(cursor[h]++);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  if (head_of_row) *head_of_row = std::move(heads);
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoint directory: manifest.json, one network file per agent and the
// normalized training rows.

inline constexpr int kCheckpointFormatVersion = 1;

struct Checkpoint {
  RunConfig run;
  std::string config_hash;
  std::size_t epoch = 0;
  std::vector<std::string> feature_names;
  std::vector<FeatureBounds> feature_bounds;
  std::size_t sensitive_index = 0;
  ClusteringResult clustering;
  std::vector<bool> reid_active;
  std::vector<double> per_head_em;
  Agents agents;
  Tensor training_rows;  // normalized

  TrainingData training_data() const {
    Dataset d;
    d.rows = training_rows;
    d.feature_names = feature_names;
    d.feature_bounds = feature_bounds;
    d.sensitive_index = sensitive_index;
    d.normalized = true;
    return mhgan::training_data(d, clustering);
  }
};

inline Checkpoint make_checkpoint(const RunConfig& run, const PreparedData& data,
                                  const Agents& agents, const TrainingState& state) {
  Checkpoint c;
  c.run = run;
  c.config_hash = config_hash(run);
  c.epoch = state.epoch;
  c.feature_names = data.normalized.feature_names;
  c.feature_bounds = data.normalized.feature_bounds;
  c.sensitive_index = data.normalized.sensitive_index;
  c.clustering = data.clustering;
  c.reid_active = state.reid_active;
  c.per_head_em = state.per_head_em;
  c.agents = agents;
  c.training_rows = data.normalized.rows;
  return c;
}

namespace detail {

inline std::string agent_file(const std::string& stem) { return stem + ".net"; }

inline std::vector<std::string> checkpoint_files(const Agents& a) {
  std::vector<std::string> files = {agent_file("generator_trunk")};
  for (std::size_t h = 0; h < a.generator.heads.size(); ++h) {
    files.push_back(agent_file("generator_head_" + std::to_string(h)));
  }
  for (std::size_t h = 0; h < a.critics.size(); ++h) {
    files.push_back(agent_file("critic_" + std::to_string(h)));
  }
  for (std::size_t r = 0; r < a.reids.size(); ++r) {
    files.push_back(agent_file("reid_" + std::to_string(r)));
  }
  return files;
}

}  // namespace detail

inline void save_checkpoint(const std::string& dir, const Checkpoint& c) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create checkpoint directory " + dir + ": " + ec.message());
  const fs::path root(dir);
  const Agents& a = c.agents;
  save_network((root / "generator_trunk.net").string(), a.generator.trunk);
  for (std::size_t h = 0; h < a.generator.heads.size(); ++h) {
    save_network((root / ("generator_head_" + std::to_string(h) + ".net")).string(),
                 a.generator.heads[h]);
  }
  for (std::size_t h = 0; h < a.critics.size(); ++h) {
    save_network((root / ("critic_" + std::to_string(h) + ".net")).string(), a.critics[h].net);
  }
  for (std::size_t r = 0; r < a.reids.size(); ++r) {
    save_network((root / ("reid_" + std::to_string(r) + ".net")).string(), a.reids[r].net);
  }
  save_csv((root / "training_rows.csv").string(), c.feature_names, c.training_rows);

  nlohmann::json bounds = nlohmann::json::array();
  for (const auto& b : c.feature_bounds) bounds.push_back({format_hex(b.min), format_hex(b.max)});
  nlohmann::json em = nlohmann::json::array();
  for (double v : c.per_head_em) em.push_back(format_hex(v));
  nlohmann::json m;
  m["format"] = "mhgan-checkpoint";
  m["version"] = kCheckpointFormatVersion;
  m["config"] = to_key_values(c.run);
  m["config_hash"] = c.config_hash;
  m["seed"] = c.run.train.seed;
  m["epoch"] = c.epoch;
  m["feature_names"] = c.feature_names;
  m["feature_bounds"] = bounds;
  m["sensitive_index"] = c.sensitive_index;
  m["noise_dim"] = a.generator.noise_dim;
  m["n_heads"] = a.generator.n_heads();
  m["reid_shared"] = a.reids.size() == 1 && a.generator.n_heads() > 1;
  m["clustering"] = clustering_summary(c.clustering);
  m["assignments"] = c.clustering.assignments;
  m["reid_active"] = c.reid_active;
  m["per_head_em"] = em;
  m["files"] = detail::checkpoint_files(a);
  std::ofstream out(root / "manifest.json");
  if (!out) throw DataError("cannot write manifest in " + dir);
  out << m.dump(2) << '\n';
}

inline Checkpoint load_checkpoint(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  std::ifstream in(root / "manifest.json");
  if (!in) throw DataError("missing checkpoint manifest in " + dir);
  Checkpoint c;
  try {
    const nlohmann::json m = nlohmann::json::parse(in);
    if (m.at("format") != "mhgan-checkpoint" ||
        m.at("version").get<int>() != kCheckpointFormatVersion) {
      throw DataError("unsupported checkpoint format in " + dir);
    }
    RunConfig run;
    for (const auto& [key, value] : m.at("config").items()) {
      set_config_value(run, key, value.get<std::string>());
    }
    c.run = run;
    c.config_hash = m.at("config_hash").get<std::string>();
    c.epoch = m.at("epoch").get<std::size_t>();
    c.feature_names = m.at("feature_names").get<std::vector<std::string>>();
    for (const auto& b : m.at("feature_bounds")) {
      c.feature_bounds.push_back(
          {parse_hex(b.at(0).get<std::string>()), parse_hex(b.at(1).get<std::string>())});
    }
    c.sensitive_index = m.at("sensitive_index").get<std::size_t>();
    const std::size_t heads = m.at("n_heads").get<std::size_t>();
    c.clustering.k = heads;
    c.clustering.assignments = m.at("assignments").get<std::vector<std::size_t>>();
    for (const auto& p : m.at("clustering").at("inertia_curve")) {
      c.clustering.inertia_curve.emplace_back(p.at("k").get<std::size_t>(),
                                              p.at("inertia").get<double>());
    }
    c.reid_active = m.at("reid_active").get<std::vector<bool>>();
    for (const auto& v : m.at("per_head_em")) c.per_head_em.push_back(parse_hex(v.get<std::string>()));

    Agents& a = c.agents;
    a.generator.noise_dim = m.at("noise_dim").get<std::size_t>();
    a.generator.out_features = c.feature_names.size();
    a.generator.trunk = load_network((root / "generator_trunk.net").string());
    for (std::size_t h = 0; h < heads; ++h) {
      a.generator.heads.push_back(
          load_network((root / ("generator_head_" + std::to_string(h) + ".net")).string()));
      a.critics.push_back({DiscriminatorRole::kRealism, h,
                           load_network((root / ("critic_" + std::to_string(h) + ".net")).string())});
    }
    const bool shared = m.at("reid_shared").get<bool>();
    std::size_t reids = 0;
    for (const auto& f : m.at("files")) {
      if (f.get<std::string>().rfind("reid_", 0) == 0) ++reids;
    }
    if (reids != 0 && reids != (shared ? 1 : heads)) {
      throw DataError("checkpoint lists " + std::to_string(reids) + " reid networks for " +
                      std::to_string(heads) + " heads");
    }
    for (std::size_t r = 0; r < reids; ++r) {
      a.reids.push_back({DiscriminatorRole::kReid, r,
                         load_network((root / ("reid_" + std::to_string(r) + ".net")).string())});
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("corrupt checkpoint manifest in " + dir + ": " + e.what());
  } catch (const ConfigError& e) {
    throw DataError("corrupt checkpoint config in " + dir + ": " + e.what());
  }
  const Dataset rows = load_csv((root / "training_rows.csv").string(),
                                c.feature_names.at(c.sensitive_index));
  if (rows.feature_names != c.feature_names) {
    throw DataError("checkpoint training rows do not match manifest columns");
  }
  c.training_rows = rows.rows;
  if (c.clustering.assignments.size() != c.training_rows.rows() ||
      c.reid_active.size() != c.clustering.k) {
    throw DataError("checkpoint manifest does not match its training rows");
  }
  for (std::size_t h = 0; h < c.clustering.k; ++h) {
    if (c.agents.generator.heads[h].output_width() != c.feature_names.size()) {
      throw DataError("generator head " + std::to_string(h) + " has the wrong output width");
    }
  }
  return c;
}

}  // namespace mhgan

#endif  // MHGAN_TRAINER_RUN_HPP_
