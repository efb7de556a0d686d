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

#ifndef MHGAN_TRAINER_TRAINER_HPP_
#define MHGAN_TRAINER_TRAINER_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "mhgan/errors.hpp"
#include "mhgan/evaluator/emd.hpp"
#include "mhgan/networks/agents.hpp"
#include "mhgan/numcore/network.hpp"
#include "mhgan/numcore/optimizer.hpp"
#include "mhgan/numcore/random.hpp"
#include "mhgan/trainer/config.hpp"
#include "mhgan/trainer/losses.hpp"

namespace mhgan {

// Every learning agent of the multi-head system.
struct Agents {
  GeneratorParams generator;
  std::vector<DiscriminatorParams> critics;  // one per head
  std::vector<DiscriminatorParams> reids;    // one per head, one shared, or none
};

struct EpochRecord {
  std::size_t epoch = 0;
  double generator_loss = 0.0;
  std::vector<double> critic_loss;       // own loss, last critic step
  std::vector<double> critic_combined;   // own + all other discriminators
  std::vector<double> reid_loss;         // NaN while inactive
  std::vector<double> reid_adversarial;  // NaN while inactive
  std::vector<double> per_head_em;
  std::vector<bool> reid_active;
};

struct TrainingState {
  std::size_t epoch = 0;
  std::vector<double> per_head_em;
  std::vector<bool> reid_active;
  std::uint64_t seed = 0;
  Rng rng;
  Optimizer generator_opt;
  std::vector<Optimizer> critic_opts;
  std::vector<Optimizer> reid_opts;
  std::vector<EpochRecord> history;
};

// Static inputs of a training run: unit-scale rows per cluster.
struct TrainingData {
  std::vector<Tensor> partitions;
  std::size_t sensitive_index = 0;

  std::size_t n_heads() const { return partitions.size(); }
  std::size_t n_features() const {
    return partitions.empty() ? 0 : partitions.front().cols();
  }
  std::vector<std::size_t> nonsensitive_columns() const {
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < n_features(); ++c) {
      if (c != sensitive_index) cols.push_back(c);
    }
    return cols;
  }
};

inline bool reid_possible(const TrainConfig& cfg, const TrainingData& data) {
  return cfg.reid_enabled && data.n_features() >= 2;
}

// Which re-identification net serves head `h`.
inline std::size_t reid_slot(const Agents& a, std::size_t h) {
  return a.reids.size() == 1 ? 0 : h;
}

inline Agents build_agents(const TrainConfig& cfg, const TrainingData& data) {
  if (data.n_heads() == 0) throw ArgumentError("no data partitions");
  Agents a;
  a.generator = build_generator(data.n_heads(), data.n_features(), cfg.arch,
                                derive_seed(cfg.seed, 1));
  for (std::size_t h = 0; h < data.n_heads(); ++h) {
    a.critics.push_back(
        build_critic(data.n_features(), cfg.arch, h, derive_seed(cfg.seed, 100 + h)));
  }
  if (reid_possible(cfg, data)) {
    const std::size_t n = cfg.reid_shared ? 1 : data.n_heads();
    for (std::size_t h = 0; h < n; ++h) {
      a.reids.push_back(
          build_reid(data.n_features(), cfg.arch, h, derive_seed(cfg.seed, 200 + h)));
    }
  }
  return a;
}

inline OptimizerConfig optimizer_config(OptimizerKind kind, double lr) {
  OptimizerConfig oc;
  oc.kind = kind;
  oc.learning_rate = lr;
  return oc;
}

inline TrainingState init_state(const TrainConfig& cfg, Agents& a) {
  TrainingState s;
  s.seed = cfg.seed;
  s.rng.seed(derive_seed(cfg.seed, 7));
  const std::size_t heads = a.critics.size();
  s.per_head_em.assign(heads, std::numeric_limits<double>::infinity());
  s.reid_active.assign(heads, false);
  s.generator_opt = Optimizer(
      optimizer_config(cfg.generator_optimizer, cfg.learning_rate),
      std::span<Tensor* const>(a.generator.parameters()));
  for (auto& c : a.critics) {
    auto p = c.net.parameters();
    s.critic_opts.emplace_back(
        optimizer_config(cfg.critic_optimizer, cfg.learning_rate),
        std::span<Tensor* const>(p));
  }
  for (auto& r : a.reids) {
    auto p = r.net.parameters();
    s.reid_opts.emplace_back(optimizer_config(cfg.reid_optimizer, cfg.learning_rate),
                             std::span<Tensor* const>(p));
  }
  return s;
}

// Latches reid_active[i] once per_head_em[i] < threshold; never unlatches.
inline void em_gate(std::span<const double> per_head_em, TrainingState& state,
                    double threshold = 0.3,
                    GateScope scope = GateScope::kPerHead) {
  if (state.reid_active.size() != per_head_em.size()) {
    state.reid_active.resize(per_head_em.size(), false);
  }
  if (scope == GateScope::kGlobal) {
    const double global = per_head_em.empty() ? 0.0 : mean_of(per_head_em);
    for (std::size_t i = 0; i < per_head_em.size(); ++i) {
      if (global < threshold) state.reid_active[i] = true;
    }
    return;
  }
  for (std::size_t i = 0; i < per_head_em.size(); ++i) {
    if (per_head_em[i] < threshold) state.reid_active[i] = true;
  }
}

// ---------------------------------------------------------------------------
// Per-agent objectives.

struct LossAndGrads {
  double loss = 0.0;
  std::vector<Tensor> grads;  // in the agent's parameters() order
};

inline std::vector<Tensor> zero_like(const Network& net) {
  std::vector<Tensor> out;
  for (const Tensor* p : net.parameters()) out.emplace_back(p->shape());
  return out;
}

// Critic loss mean(D(fake)) - mean(D(real)) and its parameter gradient.
inline LossAndGrads critic_objective(const DiscriminatorParams& critic,
                                     const Tensor& real, const Tensor& fake) {
  const Tape tr = critic.net.forward_traced(real);
  const Tape tf = critic.net.forward_traced(fake);
  LossAndGrads out;
  out.loss = critic_loss(critic.net.output(tr), critic.net.output(tf));
  Tensor up_real(critic.net.output(tr).shape(), -1.0 / static_cast<double>(real.rows()));
  Tensor up_fake(critic.net.output(tf).shape(), 1.0 / static_cast<double>(fake.rows()));
  out.grads = zero_like(critic.net);
  accumulate(out.grads, critic.net.backward(tr, up_real).params);
  accumulate(out.grads, critic.net.backward(tf, up_fake).params);
  return out;
}

// Mean squared error of the sensitive-value prediction on real rows.
inline LossAndGrads reid_objective(const DiscriminatorParams& reid,
                                   const Tensor& rows,
                                   std::span<const std::size_t> nonsensitive,
                                   std::size_t sensitive) {
  const Tensor x = select_columns(rows, nonsensitive);
  const std::size_t sens[] = {sensitive};
  const Tensor y = select_columns(rows, sens);
  const Tape t = reid.net.forward_traced(x);
  LossAndGrads out;
  out.loss = reid_fit_loss(y, reid.net.output(t));
  out.grads = zero_like(reid.net);
  accumulate(out.grads, reid.net.backward(t, reid_fit_loss_grad(y, reid.net.output(t))).params);
  return out;
}

// One term of a sum of agent losses, with gradients attached to the
// parameter tensors the term actually reads.
struct LossTerm {
  double loss = 0.0;
  std::vector<const Tensor*> params;
  std::vector<Tensor> grads;
};

// Gradient of sum(terms) with respect to `params`: each term contributes only
// where it reads the same parameter tensor.
inline std::vector<Tensor> gradient_of_sum(const std::vector<LossTerm>& terms,
                                           const std::vector<const Tensor*>& params) {
  std::vector<Tensor> out;
  for (const Tensor* p : params) out.emplace_back(p->shape());
  for (const LossTerm& t : terms) {
    for (std::size_t i = 0; i < t.params.size(); ++i) {
      for (std::size_t j = 0; j < params.size(); ++j) {
        if (t.params[i] != params[j]) continue;
        for (std::size_t e = 0; e < out[j].size(); ++e) out[j][e] += t.grads[i][e];
      }
    }
  }
  return out;
}

struct DiscriminatorStep {
  CombinedLossBreakdown breakdown;
  std::vector<Tensor> grads;
};

// Loss and update direction for discriminator `j` among `terms` (one term per
// discriminator). Under LossMode::kCombined the objective is the own loss
// plus every other term (the lambda sum); under kOwn only term j counts.
inline DiscriminatorStep discriminator_step(const std::vector<LossTerm>& terms,
                                            std::size_t j, LossMode mode) {
  DiscriminatorStep s;
  std::vector<double> others;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i != j) others.push_back(terms[i].loss);
  }
  if (mode == LossMode::kCombined) {
    s.breakdown = combined_loss(terms[j].loss, others);
    s.grads = gradient_of_sum(terms, terms[j].params);
  } else {
    s.breakdown = combined_loss(terms[j].loss, {});
    const std::vector<LossTerm> own = {terms[j]};
    s.grads = gradient_of_sum(own, terms[j].params);
  }
  return s;
}

inline LossTerm make_term(const Network& net, LossAndGrads lg) {
  LossTerm t;
  t.loss = lg.loss;
  t.params = net.parameters();
  t.grads = std::move(lg.grads);
  return t;
}

namespace detail {

inline void require_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) {
    throw DivergenceError("non-finite " + what + " detected");
  }
}

inline void apply_update(Network& net, Optimizer& opt,
                         const std::vector<Tensor>& grads) {
  auto params = net.parameters();
  opt.step(params, grads);
}

}  // namespace detail

// Generator loss for head h: -mean critic score on the head's samples, plus
// w_reid times the quadratic privacy loss when the head's re-identification
// net is active. Gradients are accumulated into `grads` (generator order).
struct GeneratorHeadLoss {
  double realism = 0.0;
  double adversarial = std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  Tensor samples;
};

inline GeneratorHeadLoss generator_head_objective(
    const Agents& a, std::size_t h, const Tensor& noise, bool reid_active,
    double w_reid, std::size_t sensitive,
    std::span<const std::size_t> nonsensitive, std::vector<Tensor>* grads) {
  const GeneratorParams& gen = a.generator;
  const GeneratorTape gt = generate_head_traced(gen, h, noise);
  const Tensor& fake = head_output(gen, gt);
  const DiscriminatorParams& critic = a.critics[h];
  const Tape ct = critic.net.forward_traced(fake);
  GeneratorHeadLoss out;
  out.samples = fake;
  out.realism = -mean_of(critic.net.output(ct).data());
  out.total = out.realism;
  const double rows = static_cast<double>(fake.rows());
  Tensor dfake;
  if (grads) {
    Tensor up(critic.net.output(ct).shape(), -1.0 / rows);
    dfake = critic.net.backward(ct, up).input;
  }
  if (reid_active && !a.reids.empty()) {
    const DiscriminatorParams& reid = a.reids[reid_slot(a, h)];
    const Tensor x = select_columns(fake, nonsensitive);
    const std::size_t sens[] = {sensitive};
    const Tensor y = select_columns(fake, sens);
    const Tape rt = reid.net.forward_traced(x);
    out.adversarial = reid_adversarial_loss(y, reid.net.output(rt));
    out.total += w_reid * out.adversarial;
    if (grads) {
      ReidAdversarialGrad g = reid_adversarial_loss_grad(y, reid.net.output(rt));
      for (double& v : g.d_pred.storage()) v *= w_reid;
      const Tensor dx = reid.net.backward(rt, g.d_pred).input;
      for (std::size_t r = 0; r < fake.rows(); ++r) {
        for (std::size_t j = 0; j < nonsensitive.size(); ++j) {
          dfake.at(r, nonsensitive[j]) += dx.at(r, j);
        }
        dfake.at(r, sensitive) += w_reid * g.d_true[r];
      }
    }
  }
  if (grads) generator_backward(gen, gt, dfake, *grads);
  return out;
}

// One epoch: n_critic rounds of critic updates (all heads from one snapshot,
// each followed by weight clipping), one re-identification fit step per
// active head, then a single generator step on the summed head losses.
inline void train_epoch(TrainingState& state, Agents& a, const TrainingData& data,
                        const TrainConfig& cfg) {
  const std::size_t heads = data.n_heads();
  if (heads != a.generator.n_heads() || heads != a.critics.size()) {
    throw DimensionError("partition count " + std::to_string(heads) +
                         " does not match generator heads " +
                         std::to_string(a.generator.n_heads()));
  }
  const std::size_t batch = cfg.batch_size;
  const std::size_t noise_dim = a.generator.noise_dim;
  const auto nonsensitive = data.nonsensitive_columns();
  const std::size_t sensitive = data.sensitive_index;

  EpochRecord rec;
  rec.epoch = state.epoch + 1;
  rec.critic_loss.assign(heads, 0.0);
  rec.critic_combined.assign(heads, 0.0);
  rec.reid_loss.assign(heads, std::numeric_limits<double>::quiet_NaN());
  rec.reid_adversarial.assign(heads, std::numeric_limits<double>::quiet_NaN());

  // Latest re-identification losses, constants inside the critic objective.
  std::vector<LossTerm> reid_terms;
  if (!state.history.empty()) {
    const EpochRecord& last = state.history.back();
    for (std::size_t r = 0; r < a.reids.size(); ++r) {
      const double v = last.reid_loss[a.reids.size() == 1 ? 0 : r];
      if (std::isfinite(v)) reid_terms.push_back({v, {}, {}});
    }
  }

  // Critic phase.
  for (std::size_t t = 0; t < cfg.n_critic; ++t) {
    std::vector<LossTerm> terms;
    for (std::size_t h = 0; h < heads; ++h) {
      const Tensor& part = data.partitions[h];
      const Tensor real = select_rows(part, sample_indices(state.rng, part.rows(), batch));
      const Tensor noise = normal_matrix(state.rng, batch, noise_dim);
      const Tensor fake = generate_head(a.generator, h, noise);
      terms.push_back(make_term(a.critics[h].net,
                                critic_objective(a.critics[h], real, fake)));
    }
    terms.insert(terms.end(), reid_terms.begin(), reid_terms.end());
    for (std::size_t h = 0; h < heads; ++h) {
      DiscriminatorStep step = discriminator_step(terms, h, cfg.loss_mode);
      detail::require_finite(step.breakdown.total, "critic loss");
      detail::apply_update(a.critics[h].net, state.critic_opts[h], step.grads);
      auto params = a.critics[h].net.parameters();
      clip_weights(params, cfg.clip);
      rec.critic_loss[h] = step.breakdown.own_loss;
      rec.critic_combined[h] = combined_loss(step.breakdown.own_loss, {}).total;
    }
    if (t + 1 == cfg.n_critic) {
      for (std::size_t h = 0; h < heads; ++h) {
        std::vector<double> others;
        for (std::size_t i = 0; i < terms.size(); ++i) {
          if (i != h) others.push_back(terms[i].loss);
        }
        rec.critic_combined[h] = combined_loss(terms[h].loss, others).total;
      }
    }
  }

  // Re-identification phase: fit on real rows of every active head.
  if (!a.reids.empty()) {
    std::vector<LossTerm> terms;
    std::vector<std::size_t> owners;
    if (a.reids.size() == 1) {
      bool any = false;
      for (bool b : state.reid_active) any = any || b;
      if (any) {
        std::vector<std::size_t> active;
        for (std::size_t h = 0; h < heads; ++h) {
          if (state.reid_active[h]) active.push_back(h);
        }
        Tensor rows = Tensor::matrix(batch, data.n_features());
        for (std::size_t r = 0; r < batch; ++r) {
          std::uniform_int_distribution<std::size_t> pick_head(0, active.size() - 1);
          const Tensor& part = data.partitions[active[pick_head(state.rng)]];
          std::uniform_int_distribution<std::size_t> pick_row(0, part.rows() - 1);
          auto src = part.row(pick_row(state.rng));
          std::copy(src.begin(), src.end(), rows.row(r).begin());
        }
        terms.push_back(make_term(a.reids[0].net,
                                  reid_objective(a.reids[0], rows, nonsensitive, sensitive)));
        owners.push_back(0);
      }
    } else {
      for (std::size_t h = 0; h < heads; ++h) {
        if (!state.reid_active[h]) continue;
        const Tensor& part = data.partitions[h];
        const Tensor rows = select_rows(part, sample_indices(state.rng, part.rows(), batch));
        terms.push_back(make_term(a.reids[h].net,
                                  reid_objective(a.reids[h], rows, nonsensitive, sensitive)));
        owners.push_back(h);
      }
    }
    const std::size_t own_terms = terms.size();
    for (std::size_t h = 0; h < heads; ++h) {
      terms.push_back({rec.critic_loss[h], {}, {}});
    }
    for (std::size_t i = 0; i < own_terms; ++i) {
      DiscriminatorStep step = discriminator_step(terms, i, cfg.loss_mode);
      detail::require_finite(step.breakdown.total, "re-identification loss");
      const std::size_t slot = owners[i];
      detail::apply_update(a.reids[slot].net, state.reid_opts[slot], step.grads);
      if (a.reids.size() == 1) {
        for (std::size_t h = 0; h < heads; ++h) {
          if (state.reid_active[h]) rec.reid_loss[h] = step.breakdown.own_loss;
        }
      } else {
        rec.reid_loss[slot] = step.breakdown.own_loss;
      }
    }
  }

  // Generator phase.
  std::vector<Tensor> grads;
  for (const Tensor* p : a.generator.parameters()) grads.emplace_back(p->shape());
  std::vector<Tensor> samples;
  double gen_total = 0.0;
  for (std::size_t h = 0; h < heads; ++h) {
    const Tensor noise = normal_matrix(state.rng, batch, noise_dim);
    GeneratorHeadLoss hl = generator_head_objective(
        a, h, noise, state.reid_active[h] && !a.reids.empty(), cfg.w_reid,
        sensitive, nonsensitive, &grads);
    gen_total += hl.total;
    rec.reid_adversarial[h] = hl.adversarial;
    samples.push_back(std::move(hl.samples));
  }
  detail::require_finite(gen_total, "generator loss");
  {
    auto params = a.generator.parameters();
    state.generator_opt.step(params, grads);
  }
  rec.generator_loss = gen_total;

  // Gate on per-head EM between this epoch's samples and the cluster.
  Rng em_rng(derive_seed(state.seed, 1'000'000 + rec.epoch));
  state.per_head_em.assign(heads, 0.0);
  for (std::size_t h = 0; h < heads; ++h) {
    state.per_head_em[h] = mean_feature_em(data.partitions[h], samples[h], em_rng).mean;
  }
  em_gate(state.per_head_em, state, cfg.em_gate, cfg.gate_scope);
  rec.per_head_em = state.per_head_em;
  rec.reid_active = state.reid_active;

  state.epoch += 1;
  state.history.push_back(std::move(rec));
}

inline void write_log_header(std::ostream& out, std::size_t heads) {
  out << "epoch,generator_loss";
  for (std::size_t h = 0; h < heads; ++h) {
    out << ",critic_loss_" << h << ",critic_combined_" << h << ",reid_loss_" << h
        << ",reid_adversarial_" << h << ",em_" << h << ",reid_active_" << h;
  }
  out << '\n';
}

inline void write_log_row(std::ostream& out, const EpochRecord& r) {
  auto num = [&out](double v) {
    if (std::isnan(v)) {
      out << "nan";
    } else {
      out << v;
    }
  };
  out.precision(17);
  out << r.epoch << ',';
  num(r.generator_loss);
  for (std::size_t h = 0; h < r.critic_loss.size(); ++h) {
    out << ',';
    num(r.critic_loss[h]);
    out << ',';
    num(r.critic_combined[h]);
    out << ',';
    num(r.reid_loss[h]);
    out << ',';
    num(r.reid_adversarial[h]);
    out << ',';
    num(r.per_head_em[h]);
    out << ',' << (r.reid_active[h] ? 1 : 0);
  }
  out << '\n';
}

}  // namespace mhgan

#endif  // MHGAN_TRAINER_TRAINER_HPP_
