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

#ifndef MHGAN_TRAINER_PROBE_HPP_
#define MHGAN_TRAINER_PROBE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "mhgan/errors.hpp"
#include "mhgan/numcore/random.hpp"
#include "mhgan/numcore/tensor.hpp"
#include "mhgan/trainer/config.hpp"
#include "mhgan/trainer/trainer.hpp"

namespace mhgan {

// A player of the game: the parameters it controls and the cost it
// minimizes, evaluated with every other player held fixed.
struct ProbeAgent {
  std::string name;
  std::vector<Tensor*> params;
  std::function<double()> cost;
};

struct AgentProbeResult {
  std::string name;
  double baseline = 0.0;
  std::vector<double> deltas;  // cost(perturbed) - cost(baseline), per trial
  std::size_t passed = 0;

  double pass_fraction() const {
    return deltas.empty() ? 1.0
                          : static_cast<double>(passed) / static_cast<double>(deltas.size());
  }
};

struct ProbeReport {
  double gamma = 0.0;
  double epsilon = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<AgentProbeResult> agents;

  double min_pass_fraction() const {
    double m = 1.0;
    for (const auto& a : agents) m = std::min(m, a.pass_fraction());
    return m;
  }
};

inline void validate(const ProbeConfig& cfg) {
  if (!(cfg.gamma > 0.0)) throw ArgumentError("probe gamma must be positive");
  if (!(cfg.epsilon >= 0.0)) throw ArgumentError("probe epsilon must be non-negative");
  if (cfg.trials == 0) throw ArgumentError("probe trials must be positive");
}

// For each agent and trial, draws theta' uniformly from the max-norm ball of
// radius gamma around the current parameters and records whether
// cost(theta') >= cost(theta) - epsilon, i.e. the perturbation does not beat
// the current point by more than the slack. Parameters are restored exactly.
inline ProbeReport equilibrium_probe(std::vector<ProbeAgent>& agents,
                                     const ProbeConfig& cfg) {
  validate(cfg);
  ProbeReport report;
  report.gamma = cfg.gamma;
  report.epsilon = cfg.epsilon;
  report.trials = cfg.trials;
  report.seed = cfg.seed;
  for (std::size_t a = 0; a < agents.size(); ++a) {
    ProbeAgent& agent = agents[a];
    Rng rng(derive_seed(cfg.seed, a));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<Tensor> saved;
    for (const Tensor* p : agent.params) saved.push_back(*p);

    AgentProbeResult res;
    res.name = agent.name;
    res.baseline = agent.cost();
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      for (Tensor* p : agent.params) {
        for (double& v : p->storage()) v += cfg.gamma * unit(rng);
      }
      const double perturbed = agent.cost();
      for (std::size_t i = 0; i < saved.size(); ++i) *agent.params[i] = saved[i];
      res.deltas.push_back(perturbed - res.baseline);
      if (perturbed >= res.baseline - cfg.epsilon) ++res.passed;
    }
    report.agents.push_back(std::move(res));
  }
  return report;
}

// Frozen inputs shared by every cost in the adversarial game probe.
struct ProbeBatches {
  std::vector<Tensor> real;   // per head
  std::vector<Tensor> noise;  // per head
};

inline ProbeBatches draw_probe_batches(const TrainingData& data, std::size_t noise_dim,
                                       const ProbeConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, 0xB47C4));
  ProbeBatches b;
  for (const Tensor& part : data.partitions) {
    if (part.rows() <= cfg.real_rows) {
      b.real.push_back(part);
    } else {
      b.real.push_back(select_rows(part, sample_indices(rng, part.rows(), cfg.real_rows)));
    }
    b.noise.push_back(normal_matrix(rng, cfg.noise_rows, noise_dim));
  }
  return b;
}

// The trained game as a set of probe agents. Each discriminator's cost is its
// own loss plus every other discriminator's loss; the generator's cost sums
// the realism and (for active heads) privacy terms over heads.
class GameProbe {
 public:
  GameProbe(Agents& agents, const TrainingData& data, std::vector<bool> reid_active,
            double w_reid, const ProbeConfig& cfg)
      : agents_(agents),
        data_(data),
        reid_active_(std::move(reid_active)),
        w_reid_(w_reid),
        batches_(draw_probe_batches(data, agents.generator.noise_dim, cfg)),
        nonsensitive_(data.nonsensitive_columns()) {
    if (reid_active_.size() != data.n_heads()) {
      throw DimensionError("reid_active has " + std::to_string(reid_active_.size()) +
                           " flags for " + std::to_string(data.n_heads()) + " heads");
    }
    refresh_fake();
  }

  // Generated batches seen by the critics. Valid while the generator holds
  // its unperturbed parameters.
  void refresh_fake() {
    fake_.clear();
    for (std::size_t h = 0; h < data_.n_heads(); ++h) {
      fake_.push_back(generate_head(agents_.generator, h, batches_.noise[h]));
    }
  }

  double critic_own(std::size_t h) const {
    const DiscriminatorParams& c = agents_.critics[h];
    return critic_loss(c.net.forward(batches_.real[h]), c.net.forward(fake_[h]));
  }

  double reid_own(std::size_t slot) const {
    const DiscriminatorParams& r = agents_.reids[slot];
    const std::size_t sens[] = {data_.sensitive_index};
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t h = 0; h < data_.n_heads(); ++h) {
      if (agents_.reids.size() != 1 && h != slot) continue;
      const Tensor& rows = batches_.real[h];
      total += reid_fit_loss(select_columns(rows, sens),
                             r.net.forward(select_columns(rows, nonsensitive_)));
      ++count;
    }
    return total / static_cast<double>(count);
  }

  // Own losses of every discriminator, critics first, then reids.
  std::vector<double> discriminator_losses() const {
    std::vector<double> out;
    for (std::size_t h = 0; h < agents_.critics.size(); ++h) out.push_back(critic_own(h));
    for (std::size_t r = 0; r < agents_.reids.size(); ++r) out.push_back(reid_own(r));
    return out;
  }

  double combined_cost(std::size_t j) const {
    const std::vector<double> all = discriminator_losses();
    std::vector<double> others;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (i != j) others.push_back(all[i]);
    }
    return combined_loss(all[j], others).total;
  }

  double generator_cost() const {
    double total = 0.0;
    for (std::size_t h = 0; h < data_.n_heads(); ++h) {
      total += generator_head_objective(agents_, h, batches_.noise[h],
                                        reid_active_[h] && !agents_.reids.empty(),
                                        w_reid_, data_.sensitive_index, nonsensitive_,
                                        nullptr)
                   .total;
    }
    return total;
  }

  std::vector<ProbeAgent> agents() {
    std::vector<ProbeAgent> out;
    out.push_back({"generator", agents_.generator.parameters(),
                   [this] { return generator_cost(); }});
    const std::size_t critics = agents_.critics.size();
    for (std::size_t h = 0; h < critics; ++h) {
      out.push_back({"critic_" + std::to_string(h), agents_.critics[h].net.parameters(),
                     [this, h] { return combined_cost(h); }});
    }
    for (std::size_t r = 0; r < agents_.reids.size(); ++r) {
      const std::string name =
          agents_.reids.size() == 1 ? "reid_shared" : "reid_" + std::to_string(r);
      out.push_back({name, agents_.reids[r].net.parameters(),
                     [this, critics, r] { return combined_cost(critics + r); }});
    }
    return out;
  }

 private:
  Agents& agents_;
  const TrainingData& data_;
  std::vector<bool> reid_active_;
  double w_reid_;
  ProbeBatches batches_;
  std::vector<std::size_t> nonsensitive_;
  std::vector<Tensor> fake_;
};

inline ProbeReport probe_game(Agents& agents, const TrainingData& data,
                              const std::vector<bool>& reid_active, double w_reid,
                              const ProbeConfig& cfg) {
  validate(cfg);
  GameProbe game(agents, data, reid_active, w_reid, cfg);
  std::vector<ProbeAgent> players = game.agents();
  return equilibrium_probe(players, cfg);
}

inline nlohmann::json to_json(const ProbeReport& r) {
  nlohmann::json j;
  j["gamma"] = r.gamma;
  j["epsilon"] = r.epsilon;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["agents"] = nlohmann::json::array();
  for (const auto& a : r.agents) {
    j["agents"].push_back({{"name", a.name},
                           {"baseline_cost", a.baseline},
                           {"pass_fraction", a.pass_fraction()},
                           {"passed", a.passed},
                           {"deltas", a.deltas}});
  }
  return j;
}

}  // namespace mhgan

#endif  // MHGAN_TRAINER_PROBE_HPP_
