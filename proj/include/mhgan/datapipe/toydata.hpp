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

#ifndef MHGAN_DATAPIPE_TOYDATA_HPP_
#define MHGAN_DATAPIPE_TOYDATA_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mhgan/errors.hpp"
#include "mhgan/numcore/random.hpp"
#include "mhgan/numcore/tensor.hpp"

namespace mhgan {

struct ToyTable {
  std::vector<std::string> names;
  Tensor rows;
  std::vector<std::size_t> labels;  // generating component per row, if any
  std::string sensitive;            // suggested sensitive column
};

inline constexpr std::size_t kBlobDims = 6;
inline constexpr double kBlobSigma = 0.01;
inline constexpr double kBlobMinSeparation = 0.5;
inline constexpr double kBlobMinAxisSpread = 0.5;

// Three isotropic Gaussians with centers in [0.1, 0.9]^6, pairwise at least
// 0.5 apart. Centers also spread by at least 0.5 along every axis, so the
// blobs stay nearly round after per-feature min-max scaling. Rows are
// grouped by blob.
inline ToyTable make_blobs3(std::size_t n, std::uint64_t seed) {
  if (n < 3) throw ArgumentError("blobs3 needs at least 3 rows");
  Rng rng(derive_seed(seed, 0xB10B));
  std::uniform_real_distribution<double> pos(0.1, 0.9);
  std::normal_distribution<double> noise(0.0, kBlobSigma);
  std::vector<std::vector<double>> centers;
  while (centers.size() < 3) {
    std::vector<double> c(kBlobDims);
    for (double& v : c) v = pos(rng);
    bool ok = true;
    for (const auto& o : centers) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < kBlobDims; ++j) d2 += (c[j] - o[j]) * (c[j] - o[j]);
      ok = ok && std::sqrt(d2) >= kBlobMinSeparation;
    }
    if (ok) centers.push_back(std::move(c));
    if (centers.size() == 3) {
      for (std::size_t j = 0; j < kBlobDims; ++j) {
        const double lo = std::min({centers[0][j], centers[1][j], centers[2][j]});
        const double hi = std::max({centers[0][j], centers[1][j], centers[2][j]});
        if (hi - lo < kBlobMinAxisSpread) {
          centers.clear();
          break;
        }
      }
    }
  }
  ToyTable t;
  for (std::size_t j = 0; j < kBlobDims; ++j) t.names.push_back("x" + std::to_string(j));
  t.sensitive = "x0";
  t.rows = Tensor::matrix(n, kBlobDims);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t b = r * 3 / n;
    t.labels.push_back(b);
    for (std::size_t j = 0; j < kBlobDims; ++j) t.rows.at(r, j) = centers[b][j] + noise(rng);
  }
  return t;
}

inline constexpr std::size_t kCopycolFeatures = 14;
inline constexpr std::size_t kCopycolSource = 3;
inline constexpr double kCopycolNoise = 0.05;

// Thirteen skewed features driven by one latent factor with graded loadings,
// plus a sensitive column equal to feature 3 with N(0, 0.05) noise.
inline ToyTable make_copycol(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw ArgumentError("copycol needs at least 2 rows");
  Rng rng(derive_seed(seed, 0xC0C0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, kCopycolNoise);
  constexpr std::size_t kPlain = kCopycolFeatures - 1;
  ToyTable t;
  for (std::size_t j = 0; j < kPlain; ++j) t.names.push_back("f" + std::to_string(j));
  t.names.push_back("sensitive");
  t.sensitive = "sensitive";
  t.rows = Tensor::matrix(n, kCopycolFeatures);
  for (std::size_t r = 0; r < n; ++r) {
    const double u = unit(rng);
    const double z = u * u;
    for (std::size_t j = 0; j < kPlain; ++j) {
      const double e = unit(rng);
      if (j == kCopycolSource) {
        t.rows.at(r, j) = z;
      } else {
        // Loading falls from 0.95 to 0 with distance from the source.
        const std::size_t dist = j > kCopycolSource ? j - kCopycolSource : kCopycolSource - j;
        const double rho = std::max(0.0, 0.95 - 0.1 * static_cast<double>(dist - 1));
        t.rows.at(r, j) = rho * z + std::sqrt(1.0 - rho * rho) * e * e;
      }
    }
    t.rows.at(r, kPlain) = z + noise(rng);
  }
  return t;
}

inline constexpr std::size_t kHeartRows = 303;

// Fourteen correlated columns shaped like the public heart disease table:
// thirteen clinical attributes plus a diagnosis, with integer codes where the
// original has categories.
inline ToyTable make_heartlike(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw ArgumentError("heartlike needs at least 2 rows");
  Rng rng(derive_seed(seed, 0x4EA7));
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto clampd = [](double v, double lo, double hi) { return std::clamp(v, lo, hi); };
  ToyTable t;
  t.names = {"age",     "sex",   "cp",    "trestbps", "chol", "fbs",  "restecg",
             "thalach", "exang", "oldpeak", "slope",  "ca",   "thal", "target"};
  t.sensitive = "age";
  t.rows = Tensor::matrix(n, t.names.size());
  for (std::size_t r = 0; r < n; ++r) {
    const double risk = g(rng);  // latent disease severity
    const double ageing = g(rng);
    const double age = clampd(54.0 + 9.0 * (0.8 * ageing + 0.3 * risk), 29.0, 77.0);
    const double sex = unit(rng) < 0.68 + 0.1 * std::tanh(risk) ? 1.0 : 0.0;
    const double cp = clampd(std::round(1.0 - 0.8 * risk + g(rng)), 0.0, 3.0);
    const double trestbps = clampd(131.0 + 10.0 * ageing + 12.0 * g(rng), 94.0, 200.0);
    const double chol = clampd(246.0 + 20.0 * ageing + 45.0 * g(rng), 126.0, 564.0);
    const double fbs = unit(rng) < 0.15 + 0.05 * std::tanh(ageing) ? 1.0 : 0.0;
    const double restecg = clampd(std::round(0.5 + 0.5 * g(rng)), 0.0, 2.0);
    const double thalach =
        clampd(150.0 - 12.0 * ageing - 10.0 * risk + 14.0 * g(rng), 71.0, 202.0);
    const double exang = unit(rng) < 1.0 / (1.0 + std::exp(-(1.2 * risk - 0.8))) ? 1.0 : 0.0;
    const double oldpeak = clampd(1.0 + 0.8 * risk + 0.7 * g(rng), 0.0, 6.2);
    const double slope = clampd(std::round(1.4 - 0.4 * risk + 0.5 * g(rng)), 0.0, 2.0);
    const double ca = clampd(std::round(0.7 + 0.6 * risk + 0.3 * ageing + 0.6 * g(rng)), 0.0, 4.0);
    const double thal = clampd(std::round(2.3 + 0.4 * risk + 0.5 * g(rng)), 0.0, 3.0);
    const double target = risk + 0.5 * g(rng) < 0.1 ? 1.0 : 0.0;
    const double row[] = {age,     sex,   cp,      trestbps, chol, fbs,  restecg,
                          thalach, exang, oldpeak, slope,    ca,   thal, target};
    std::copy(std::begin(row), std::end(row), t.rows.row(r).begin());
  }
  return t;
}

inline ToyTable make_toy(const std::string& kind, std::size_t n, std::uint64_t seed) {
  if (kind == "blobs3") return make_blobs3(n, seed);
  if (kind == "copycol") return make_copycol(n, seed);
  if (kind == "heartlike") return make_heartlike(n, seed);
  throw ArgumentError("unknown toy dataset kind '" + kind +
                      "' (expected blobs3, copycol or heartlike)");
}

}  // namespace mhgan

#endif  // MHGAN_DATAPIPE_TOYDATA_HPP_
