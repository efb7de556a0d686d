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

#ifndef MHGAN_NUMCORE_RANDOM_HPP_
#define MHGAN_NUMCORE_RANDOM_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "mhgan/numcore/tensor.hpp"

namespace mhgan {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent child seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_seed(seed ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

inline Tensor normal_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor t = Tensor::matrix(rows, cols);
  for (double& v : t.storage()) v = normal(rng);
  return t;
}

inline Tensor uniform_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                             double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> uniform(lo, hi);
  Tensor t = Tensor::matrix(rows, cols);
  for (double& v : t.storage()) v = uniform(rng);
  return t;
}

// Indices drawn uniformly with replacement from [0, n).
inline std::vector<std::size_t> sample_indices(Rng& rng, std::size_t n,
                                               std::size_t count) {
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> idx(count);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

}  // namespace mhgan

#endif  // MHGAN_NUMCORE_RANDOM_HPP_
