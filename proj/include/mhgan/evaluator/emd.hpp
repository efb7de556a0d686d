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

#ifndef MHGAN_EVALUATOR_EMD_HPP_
#define MHGAN_EVALUATOR_EMD_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mhgan/errors.hpp"
#include "mhgan/numcore/random.hpp"
#include "mhgan/numcore/tensor.hpp"

namespace mhgan {

// Earth mover's distance between two equal-size, equal-weight 1-D samples:
// the mean absolute difference of the order statistics.
inline double emd_1d(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("emd_1d: sample sizes differ (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + "); resample first");
  }
  if (a.empty()) throw ArgumentError("emd_1d: empty samples");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double total = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) total += std::fabs(sa[i] - sb[i]);
  return total / static_cast<double>(sa.size());
}

// Rows drawn with replacement until `rows` are present.
inline Tensor resample_rows(const Tensor& m, std::size_t rows, Rng& rng) {
  if (m.rows() == 0) throw ArgumentError("cannot resample an empty matrix");
  if (m.rows() == rows) return m;
  return select_rows(m, sample_indices(rng, m.rows(), rows));
}

struct FeatureEm {
  double mean = 0.0;
  std::vector<double> per_feature;
};

// Mean over features of the 1-D EMD. `synth` is resampled (seeded, with
// replacement) to the row count of `real` when the counts differ.
inline FeatureEm mean_feature_em(const Tensor& real, const Tensor& synth,
                                 Rng& rng) {
  if (real.cols() != synth.cols()) {
    throw DimensionError("mean_feature_em: real has " +
                         std::to_string(real.cols()) + " features, synthetic has " +
                         std::to_string(synth.cols()));
  }
  const Tensor s = resample_rows(synth, real.rows(), rng);
  FeatureEm out;
  for (std::size_t c = 0; c < real.cols(); ++c) {
    out.per_feature.push_back(emd_1d(column(real, c), column(s, c)));
  }
  double sum = 0.0;
  for (double v : out.per_feature) sum += v;
  out.mean = sum / static_cast<double>(out.per_feature.size());
  return out;
}

inline FeatureEm mean_feature_em(const Tensor& real, const Tensor& synth,
                                 std::uint64_t seed) {
  Rng rng(seed);
  return mean_feature_em(real, synth, rng);
}

// Sliced Wasserstein-1: mean 1-D EMD over random unit projections.
inline double sliced_em(const Tensor& real, const Tensor& synth,
                        std::size_t projections, std::uint64_t seed) {
  if (real.cols() != synth.cols()) {
    throw DimensionError("sliced_em: feature counts differ");
  }
  Rng rng(seed);
  const Tensor s = resample_rows(synth, real.rows(), rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  double total = 0.0;
  std::vector<double> pa(real.rows()), pb(real.rows()), dir(real.cols());
  for (std::size_t p = 0; p < projections; ++p) {
    double norm = 0.0;
    for (double& d : dir) {
      d = normal(rng);
      norm += d * d;
    }
    norm = std::sqrt(norm);
    for (double& d : dir) d /= norm;
    for (std::size_t r = 0; r < real.rows(); ++r) {
      double x = 0.0, y = 0.0;
      for (std::size_t c = 0; c < real.cols(); ++c) {
        x += dir[c] * real.at(r, c);
        y += dir[c] * s.at(r, c);
      }
      pa[r] = x;
      pb[r] = y;
    }
    total += emd_1d(pa, pb);
  }
  return total / static_cast<double>(projections);
}

}  // namespace mhgan

#endif  // MHGAN_EVALUATOR_EMD_HPP_
