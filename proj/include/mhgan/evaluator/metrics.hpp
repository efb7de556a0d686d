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

#ifndef MHGAN_EVALUATOR_METRICS_HPP_
#define MHGAN_EVALUATOR_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mhgan/datapipe/dataset.hpp"
#include "mhgan/errors.hpp"
#include "mhgan/evaluator/predictors.hpp"
#include "mhgan/numcore/tensor.hpp"

namespace mhgan {

// Population Pearson coefficient. Throws ArgumentError when either input is
// constant (the coefficient is undefined).
inline double pearson_corr(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DimensionError("pearson_corr: need two equal-length samples of size >= 2");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw ArgumentError("pearson_corr: constant input, correlation undefined");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Ranks starting at 1; ties receive their average rank.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double spearman_corr(std::span<const double> x, std::span<const double> y) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson_corr(rx, ry);
}

struct ModelMaes {
  double mean = 0.0;
  std::map<std::string, double> per_model;
};

namespace detail {

// Trains the three predictors on `train` for column `target` and scores them
// on `test`. Both matrices share the same column layout.
inline void score_target(const Tensor& train, const Tensor& test,
                         std::size_t target, std::map<std::string, double>& sums) {
  FittedPredictors fitted = fit_predictors(train, target);
  std::vector<std::size_t> inputs;
  for (std::size_t c = 0; c < test.cols(); ++c) {
    if (c != target) inputs.push_back(c);
  }
  const Tensor x = select_columns(test, inputs);
  const std::vector<double> y = column(test, target);
  for (const auto& m : fitted.models) {
    sums[m->name()] += mean_absolute_error(y, m->predict(x));
  }
}

inline ModelMaes finish(std::map<std::string, double> sums, std::size_t targets) {
  ModelMaes out;
  for (auto& [name, s] : sums) {
    s /= static_cast<double>(targets);
    out.mean += s;
  }
  out.mean /= static_cast<double>(sums.size());
  out.per_model = std::move(sums);
  return out;
}

inline void check_compatible(const Dataset& real, const Tensor& synth) {
  if (synth.rank() != 2 || synth.cols() != real.n_features()) {
    throw DimensionError("synthetic data has " +
                         std::to_string(synth.rank() == 2 ? synth.cols() : 0) +
                         " features, real data has " +
                         std::to_string(real.n_features()));
  }
  if (real.sensitive_index >= real.n_features()) {
    throw DataError("sensitive index out of range");
  }
}

}  // namespace detail

struct UtilityResult {
  double inverse = 0.0;  // 1 - mean MAE, clamped to [0, 1]
  ModelMaes maes;
};

inline double inverse_from_mae(double mae) { return std::clamp(1.0 - mae, 0.0, 1.0); }

// Train on synthetic, test on real: each non-sensitive feature is predicted
// from the remaining non-sensitive features.
inline UtilityResult inverse_model_mae(const Dataset& real, const Tensor& synth) {
  detail::check_compatible(real, synth);
  const auto cols = real.nonsensitive_columns();
  if (cols.size() < 2) {
    throw DataError("inverse_model_mae needs at least two non-sensitive features");
  }
  const Tensor train = select_columns(synth, cols);
  const Tensor test = select_columns(real.rows, cols);
  std::map<std::string, double> sums;
  for (std::size_t t = 0; t < cols.size(); ++t) {
    detail::score_target(train, test, t, sums);
  }
  UtilityResult out;
  out.maes = detail::finish(std::move(sums), cols.size());
  out.inverse = inverse_from_mae(out.maes.mean);
  return out;
}

// Attribute-inference error: predictors trained on synthetic rows guess the
// real rows' sensitive value from their non-sensitive features.
inline ModelMaes reid_mae(const Dataset& real, const Tensor& synth) {
  detail::check_compatible(real, synth);
  if (real.n_features() < 2) {
    throw DataError("reid_mae needs at least one non-sensitive feature");
  }
  std::map<std::string, double> sums;
  detail::score_target(synth, real.rows, real.sensitive_index, sums);
  return detail::finish(std::move(sums), 1);
}

}  // namespace mhgan

#endif  // MHGAN_EVALUATOR_METRICS_HPP_
