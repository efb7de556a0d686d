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

#ifndef MHGAN_TESTS_SUPPORT_REFERENCE_WGAN_HPP_
#define MHGAN_TESTS_SUPPORT_REFERENCE_WGAN_HPP_

#include <vector>

#include "mhgan/networks/agents.hpp"
#include "mhgan/numcore/optimizer.hpp"
#include "mhgan/numcore/random.hpp"
#include "mhgan/trainer/config.hpp"

namespace mhgan::oracle {

// Reference single-pair WGAN step written against numcore directly. It
// consumes the same random stream as train_epoch.
struct ReferenceWgan {
  GeneratorParams gen;
  DiscriminatorParams critic;
  Optimizer gen_opt;
  Optimizer critic_opt;
  Rng rng;

  ReferenceWgan(GeneratorParams g, DiscriminatorParams c, const TrainConfig& cfg)
      : gen(std::move(g)), critic(std::move(c)), rng(derive_seed(cfg.seed, 7)) {
    gen_opt = Optimizer({cfg.generator_optimizer, cfg.learning_rate},
                        std::span<Tensor* const>(gen.parameters()));
    auto cp = critic.net.parameters();
    critic_opt = Optimizer({cfg.critic_optimizer, cfg.learning_rate},
                           std::span<Tensor* const>(cp));
  }

  void epoch(const Tensor& data, const TrainConfig& cfg) {
    const std::size_t b = cfg.batch_size;
    const double inv = 1.0 / static_cast<double>(b);
    for (std::size_t t = 0; t < cfg.n_critic; ++t) {
      const Tensor real = select_rows(data, sample_indices(rng, data.rows(), b));
      const Tensor fake = generate(gen, normal_matrix(rng, b, gen.noise_dim))[0];
      const Tape tr = critic.net.forward_traced(real);
      const Tape tf = critic.net.forward_traced(fake);
      auto gr = critic.net.backward(tr, Tensor({b, 1}, -inv)).params;
      const auto gf = critic.net.backward(tf, Tensor({b, 1}, inv)).params;
      for (std::size_t i = 0; i < gr.size(); ++i) {
        for (std::size_t k = 0; k < gr[i].size(); ++k) gr[i][k] = 0.0 + gr[i][k] + gf[i][k];
      }
      auto cp = critic.net.parameters();
      critic_opt.step(cp, gr);
      clip_weights(cp, cfg.clip);
    }
    const Tensor noise = normal_matrix(rng, b, gen.noise_dim);
    const GeneratorTape gt = generate_head_traced(gen, 0, noise);
    const Tape ct = critic.net.forward_traced(head_output(gen, gt));
    const Tensor dfake = critic.net.backward(ct, Tensor({b, 1}, -inv)).input;
    std::vector<Tensor> g;
    for (const Tensor* p : gen.parameters()) g.emplace_back(p->shape());
    generator_backward(gen, gt, dfake, g);
    auto gp = gen.parameters();
    gen_opt.step(gp, g);
  }
};

}  // namespace mhgan::oracle

#endif  // MHGAN_TESTS_SUPPORT_REFERENCE_WGAN_HPP_
