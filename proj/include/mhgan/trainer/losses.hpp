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

#ifndef MHGAN_TRAINER_LOSSES_HPP_
#define MHGAN_TRAINER_LOSSES_HPP_

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "mhgan/errors.hpp"
#include "mhgan/numcore/tensor.hpp"

namespace mhgan {

// Target deviation between the true and predicted sensitive value that the
// generator is pushed toward.
inline constexpr double kReidTargetDeviation = 0.25;

inline double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Wasserstein critic loss, minimized by the critic:
// mean(scores_fake) - mean(scores_real).
inline double critic_loss(const Tensor& scores_real, const Tensor& scores_fake) {
  if (scores_real.empty() || scores_fake.empty()) {
    throw ArgumentError("critic_loss: empty score batch");
  }
  return mean_of(scores_fake.data()) - mean_of(scores_real.data());
}

namespace detail {
inline void check_pair(const Tensor& a, const Tensor& b, const char* who) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(who) + ": length mismatch (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw ArgumentError(std::string(who) + ": empty input");
}
}  // namespace detail

// Mean squared error; the re-identification net's own training objective.
inline double reid_fit_loss(const Tensor& y_true, const Tensor& y_pred) {
  detail::check_pair(y_true, y_pred, "reid_fit_loss");
  double s = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double d = y_true[i] - y_pred[i];
    s += d * d;
  }
  return s / static_cast<double>(y_true.size());
}

// d(reid_fit_loss)/d(y_pred).
inline Tensor reid_fit_loss_grad(const Tensor& y_true, const Tensor& y_pred) {
  detail::check_pair(y_true, y_pred, "reid_fit_loss_grad");
  Tensor g(y_pred.shape());
  const double scale = 2.0 / static_cast<double>(y_true.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = scale * (y_pred[i] - y_true[i]);
  return g;
}

// Quadratic privacy loss: mean of (|y_true - y_pred| - 0.25)^2.
inline double reid_adversarial_loss(const Tensor& y_true, const Tensor& y_pred) {
  detail::check_pair(y_true, y_pred, "reid_adversarial_loss");
  double s = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double e = std::fabs(y_true[i] - y_pred[i]) - kReidTargetDeviation;
    s += e * e;
  }
  return s / static_cast<double>(y_true.size());
}

struct ReidAdversarialGrad {
  Tensor d_true;
  Tensor d_pred;
};

inline ReidAdversarialGrad reid_adversarial_loss_grad(const Tensor& y_true,
                                                      const Tensor& y_pred) {
  detail::check_pair(y_true, y_pred, "reid_adversarial_loss_grad");
  ReidAdversarialGrad g{Tensor(y_true.shape()), Tensor(y_pred.shape())};
  const double scale = 2.0 / static_cast<double>(y_true.size());
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double d = y_true[i] - y_pred[i];
    const double sign = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    const double v = scale * (std::fabs(d) - kReidTargetDeviation) * sign;
    g.d_true[i] = v;
    g.d_pred[i] = -v;
  }
  return g;
}

// An agent's own loss plus the summed losses of every other discriminator.
struct CombinedLossBreakdown {
  double own_loss = 0.0;
  double lambda_sum = 0.0;
  double total = 0.0;
};

inline CombinedLossBreakdown combined_loss(double own,
                                           std::span<const double> others) {
  CombinedLossBreakdown b;
  b.own_loss = own;
  for (double o : others) b.lambda_sum += o;
  b.total = own + b.lambda_sum;
  return b;
}

}  // namespace mhgan

#endif  // MHGAN_TRAINER_LOSSES_HPP_
