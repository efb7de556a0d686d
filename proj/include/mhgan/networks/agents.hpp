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

#ifndef MHGAN_NETWORKS_AGENTS_HPP_
#define MHGAN_NETWORKS_AGENTS_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mhgan/errors.hpp"
#include "mhgan/numcore/network.hpp"
#include "mhgan/numcore/random.hpp"
#include "mhgan/numcore/tensor.hpp"

namespace mhgan {

// Layer widths for the three agent kinds. Hidden layers use
// `hidden_activation`; generator heads end in a [0,1] clamp, the realism
// critic in a linear score and the re-identification net in a [0,1] clamp.
struct Architecture {
  std::size_t noise_dim = 32;
  std::vector<std::size_t> trunk_widths = {64, 128};
  std::vector<std::size_t> head_widths = {64};
  std::size_t conv_kernel = 3;
  std::size_t conv_channels = 4;
  std::vector<std::size_t> critic_widths = {64};
  Activation hidden_activation = Activation::kSymlog;
};

struct GeneratorParams {
  Network trunk;
  std::vector<Network> heads;
  std::size_t noise_dim = 0;
  std::size_t out_features = 0;

  std::size_t n_heads() const { return heads.size(); }

  // Trunk parameters first, then each head in order.
  std::vector<Tensor*> parameters() {
    std::vector<Tensor*> out = trunk.parameters();
    for (Network& h : heads) {
      auto p = h.parameters();
      out.insert(out.end(), p.begin(), p.end());
    }
    return out;
  }
  std::vector<const Tensor*> parameters() const {
    std::vector<const Tensor*> out = trunk.parameters();
    for (const Network& h : heads) {
      auto p = h.parameters();
      out.insert(out.end(), p.begin(), p.end());
    }
    return out;
  }
};

enum class DiscriminatorRole { kRealism, kReid };

inline std::string_view to_string(DiscriminatorRole r) {
  return r == DiscriminatorRole::kRealism ? "realism" : "reid";
}

struct DiscriminatorParams {
  DiscriminatorRole role = DiscriminatorRole::kRealism;
  std::size_t head_index = 0;
  Network net;
};

inline GeneratorParams build_generator(std::size_t noise_dim,
                                       std::size_t n_heads,
                                       std::size_t out_features,
                                       const std::vector<std::size_t>& trunk_widths,
                                       const std::vector<std::size_t>& head_widths,
                                       std::uint64_t seed,
                                       Activation hidden = Activation::kSymlog) {
  if (n_heads == 0) throw ArgumentError("generator needs at least one head");
  if (noise_dim == 0 || out_features == 0) {
    throw ArgumentError("generator widths must be positive");
  }
  for (std::size_t w : trunk_widths) {
    if (w == 0) throw ArgumentError("trunk widths must be positive");
  }
  for (std::size_t w : head_widths) {
    if (w == 0) throw ArgumentError("head widths must be positive");
  }
  GeneratorParams gen;
  gen.noise_dim = noise_dim;
  gen.out_features = out_features;

  std::vector<LayerSpec> trunk;
  std::size_t width = noise_dim;
  for (std::size_t w : trunk_widths) {
    trunk.push_back(LayerSpec::dense(width, w, hidden));
    width = w;
  }
  if (!trunk.empty()) {
    Rng rng(derive_seed(seed, 0));
    gen.trunk = Network(trunk, rng);
  }
  for (std::size_t h = 0; h < n_heads; ++h) {
    std::vector<LayerSpec> head;
    std::size_t w_in = width;
    for (std::size_t w : head_widths) {
      head.push_back(LayerSpec::dense(w_in, w, hidden));
      w_in = w;
    }
    head.push_back(LayerSpec::dense(w_in, out_features, Activation::kUnitClamp));
    Rng rng(derive_seed(seed, 1 + h));
    gen.heads.emplace_back(head, rng);
  }
  return gen;
}

inline GeneratorParams build_generator(std::size_t n_heads,
                                       std::size_t out_features,
                                       const Architecture& arch,
                                       std::uint64_t seed) {
  return build_generator(arch.noise_dim, n_heads, out_features,
                         arch.trunk_widths, arch.head_widths, seed,
                         arch.hidden_activation);
}

namespace detail {

inline Tensor trunk_forward(const GeneratorParams& gen, const Tensor& noise) {
  if (noise.rank() != 2 || noise.cols() != gen.noise_dim) {
    throw DimensionError("generator expects noise width " +
                         std::to_string(gen.noise_dim) + ", got shape " +
                         noise.shape_string());
  }
  return gen.trunk.empty() ? noise : gen.trunk.forward(noise);
}

}  // namespace detail

// One batch per head from a shared noise batch.
inline std::vector<Tensor> generate(const GeneratorParams& gen,
                                    const Tensor& noise) {
  const Tensor hidden = detail::trunk_forward(gen, noise);
  std::vector<Tensor> out;
  out.reserve(gen.heads.size());
  for (const Network& h : gen.heads) out.push_back(h.forward(hidden));
  return out;
}

inline Tensor generate_head(const GeneratorParams& gen, std::size_t head,
                            const Tensor& noise) {
  if (head >= gen.heads.size()) throw ArgumentError("head index out of range");
  return gen.heads[head].forward(detail::trunk_forward(gen, noise));
}

// Trace of one head's forward pass through trunk and head.
struct GeneratorTape {
  std::size_t head = 0;
  Tape trunk;
  Tape head_tape;
  Tensor noise;
};

inline GeneratorTape generate_head_traced(const GeneratorParams& gen,
                                          std::size_t head, const Tensor& noise) {
  if (head >= gen.heads.size()) throw ArgumentError("head index out of range");
  GeneratorTape t;
  t.head = head;
  t.noise = noise;
  if (gen.trunk.empty()) {
    detail::trunk_forward(gen, noise);
    t.head_tape = gen.heads[head].forward_traced(noise);
  } else {
    t.trunk = gen.trunk.forward_traced(noise);
    t.head_tape = gen.heads[head].forward_traced(gen.trunk.output(t.trunk));
  }
  return t;
}

inline const Tensor& head_output(const GeneratorParams& gen,
                                 const GeneratorTape& t) {
  return gen.heads[t.head].output(t.head_tape);
}

// Accumulates d(loss)/d(params) for one head's output gradient into `grads`,
// laid out as GeneratorParams::parameters(). Other heads' slots receive
// exact zeros.
inline void generator_backward(const GeneratorParams& gen,
                               const GeneratorTape& t,
                               const Tensor& output_grad,
                               std::vector<Tensor>& grads) {
  if (grads.empty()) {
    for (const Tensor* p : gen.parameters()) grads.emplace_back(p->shape());
  }
  Gradients hg = gen.heads[t.head].backward(t.head_tape, output_grad);
  std::size_t offset = 2 * gen.trunk.layers().size();
  for (std::size_t h = 0; h < t.head; ++h) {
    offset += 2 * gen.heads[h].layers().size();
  }
  for (std::size_t i = 0; i < hg.params.size(); ++i) {
    Tensor& dst = grads[offset + i];
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += hg.params[i][j];
  }
  if (!gen.trunk.empty()) {
    Gradients tg = gen.trunk.backward(t.trunk, hg.input);
    for (std::size_t i = 0; i < tg.params.size(); ++i) {
      Tensor& dst = grads[i];
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += tg.params[i][j];
    }
  }
}

inline std::vector<LayerSpec> discriminator_layers(std::size_t input_width,
                                                   const Architecture& arch,
                                                   Activation output) {
  if (input_width == 0) throw ArgumentError("discriminator input width is zero");
  std::vector<LayerSpec> specs;
  std::size_t width = input_width;
  if (arch.conv_channels > 0 && arch.conv_kernel > 0) {
    const std::size_t kernel = std::min(arch.conv_kernel, input_width);
    specs.push_back(LayerSpec::conv1d(input_width, kernel, arch.conv_channels,
                                      arch.hidden_activation));
    width = specs.back().output_width;
  }
  for (std::size_t w : arch.critic_widths) {
    specs.push_back(LayerSpec::dense(width, w, arch.hidden_activation));
    width = w;
  }
  specs.push_back(LayerSpec::dense(width, 1, output));
  return specs;
}

inline DiscriminatorParams build_critic(std::size_t features,
                                        const Architecture& arch,
                                        std::size_t head_index,
                                        std::uint64_t seed) {
  Rng rng(seed);
  return {DiscriminatorRole::kRealism, head_index,
          Network(discriminator_layers(features, arch, Activation::kLinear), rng)};
}

// The re-identification net sees every feature except the sensitive one.
inline DiscriminatorParams build_reid(std::size_t features,
                                      const Architecture& arch,
                                      std::size_t head_index,
                                      std::uint64_t seed) {
  if (features < 2) {
    throw ArgumentError("re-identification needs at least one non-sensitive feature");
  }
  Rng rng(seed);
  return {DiscriminatorRole::kReid, head_index,
          Network(discriminator_layers(features - 1, arch, Activation::kUnitClamp),
                  rng)};
}

inline Tensor realism_score(const DiscriminatorParams& disc, const Tensor& batch) {
  if (disc.role != DiscriminatorRole::kRealism) {
    throw ArgumentError("realism_score called on a re-identification network");
  }
  return disc.net.forward(batch);
}

inline Tensor reid_predict(const DiscriminatorParams& disc,
                           const Tensor& batch_nonsensitive) {
  if (disc.role != DiscriminatorRole::kReid) {
    throw ArgumentError("reid_predict called on a realism critic");
  }
  if (batch_nonsensitive.rank() != 2 ||
      batch_nonsensitive.cols() != disc.net.input_width()) {
    throw DimensionError(
        "reid_predict expects " + std::to_string(disc.net.input_width()) +
        " non-sensitive columns, got shape " + batch_nonsensitive.shape_string() +
        " (was the sensitive column stripped?)");
  }
  return disc.net.forward(batch_nonsensitive);
}

}  // namespace mhgan

#endif  // MHGAN_NETWORKS_AGENTS_HPP_
