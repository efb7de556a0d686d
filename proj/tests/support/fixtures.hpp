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

#ifndef MHGAN_TESTS_SUPPORT_FIXTURES_HPP_
#define MHGAN_TESTS_SUPPORT_FIXTURES_HPP_

#include <cstdint>

#include "mhgan/numcore/random.hpp"
#include "mhgan/trainer/config.hpp"
#include "mhgan/trainer/trainer.hpp"

namespace mhgan::oracle {

// Two well-separated clusters of 80 rows; the sensitive column copies
// feature 1.
inline TrainingData two_cluster_data(std::uint64_t seed) {
  Rng rng(seed);
  TrainingData d;
  for (int c = 0; c < 2; ++c) {
    Tensor part = uniform_matrix(rng, 80, 5);
    for (std::size_t r = 0; r < part.rows(); ++r) {
      for (std::size_t j = 0; j < 5; ++j) part.at(r, j) = 0.2 + 0.3 * c + 0.2 * part.at(r, j);
      part.at(r, 4) = part.at(r, 1);
    }
    d.partitions.push_back(std::move(part));
  }
  d.sensitive_index = 4;
  return d;
}

// Narrow networks and short critic loops for fast epoch-level checks.
inline TrainConfig small_config(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.seed = seed;
  cfg.batch_size = 16;
  cfg.n_critic = 2;
  cfg.arch.trunk_widths = {16, 16};
  cfg.arch.head_widths = {16};
  cfg.arch.critic_widths = {16};
  return cfg;
}

}  // namespace mhgan::oracle

#endif  // MHGAN_TESTS_SUPPORT_FIXTURES_HPP_
