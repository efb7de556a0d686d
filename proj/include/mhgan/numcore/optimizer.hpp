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

#ifndef MHGAN_NUMCORE_OPTIMIZER_HPP_
#define MHGAN_NUMCORE_OPTIMIZER_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mhgan/errors.hpp"
#include "mhgan/numcore/tensor.hpp"

namespace mhgan {

enum class OptimizerKind { kRmsprop, kAdam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kRmsprop;
  double learning_rate = 0.0002;
  double beta1 = 0.9;     // Adam first moment
  double beta2 = 0.999;   // Adam second moment
  double rho = 0.9;       // RMSprop decay
  double epsilon = 1e-8;
};

// Per-network optimizer slots. Accumulators are allocated on construction
// with the shapes of the parameters they track.
class Optimizer {
 public:
  Optimizer() = default;

  Optimizer(const OptimizerConfig& config,
            std::span<const Tensor* const> params)
      : config_(config) {
    if (!(config.learning_rate > 0.0)) {
      throw ArgumentError("learning_rate must be positive");
    }
    for (const Tensor* p : params) {
      first_.emplace_back(p->shape());
      second_.emplace_back(p->shape());
    }
  }

  Optimizer(const OptimizerConfig& config, std::span<Tensor* const> params)
      : Optimizer(config, as_const(params)) {}

  const OptimizerConfig& config() const { return config_; }
  std::int64_t step_count() const { return steps_; }
  const std::vector<Tensor>& first_moments() const { return first_; }
  const std::vector<Tensor>& second_moments() const { return second_; }

  void step(std::span<Tensor* const> params, std::span<const Tensor> grads) {
    if (params.size() != grads.size() || params.size() != second_.size()) {
      throw DimensionError("optimizer expects " +
                           std::to_string(second_.size()) +
                           " parameter tensors, got " +
                           std::to_string(params.size()) + " params and " +
                           std::to_string(grads.size()) + " grads");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!params[i]->same_shape(grads[i]) ||
          !params[i]->same_shape(second_[i])) {
        throw DimensionError("gradient " + std::to_string(i) + " shape " +
                             grads[i].shape_string() +
                             " does not match parameter " +
                             params[i]->shape_string());
      }
    }
    ++steps_;
    const double lr = config_.learning_rate;
    const double eps = config_.epsilon;
    if (config_.kind == OptimizerKind::kRmsprop) {
      const double rho = config_.rho;
      for (std::size_t i = 0; i < params.size(); ++i) {
        auto p = params[i]->data();
        auto g = grads[i].data();
        auto v = second_[i].data();
        for (std::size_t j = 0; j < p.size(); ++j) {
          v[j] = rho * v[j] + (1.0 - rho) * g[j] * g[j];
          p[j] -= lr * g[j] / (std::sqrt(v[j]) + eps);
        }
      }
    } else {
      const double b1 = config_.beta1;
      const double b2 = config_.beta2;
      const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
      const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
      for (std::size_t i = 0; i < params.size(); ++i) {
        auto p = params[i]->data();
        auto g = grads[i].data();
        auto m = first_[i].data();
        auto v = second_[i].data();
        for (std::size_t j = 0; j < p.size(); ++j) {
          m[j] = b1 * m[j] + (1.0 - b1) * g[j];
          v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
          const double mhat = m[j] / c1;
          const double vhat = v[j] / c2;
          p[j] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
      }
    }
  }

 private:
  static std::vector<const Tensor*> as_const(std::span<Tensor* const> params) {
    return {params.begin(), params.end()};
  }

  OptimizerConfig config_;
  std::vector<Tensor> first_;
  std::vector<Tensor> second_;
  std::int64_t steps_ = 0;
};

// Clamps every entry of every tensor into [-c, c].
inline void clip_weights(std::span<Tensor* const> params, double c) {
  if (!(c > 0.0)) throw ArgumentError("clip constant must be positive");
  for (Tensor* p : params) {
    for (double& w : p->storage()) {
      if (w > c) {
        w = c;
      } else if (w < -c) {
        w = -c;
      }
    }
  }
}

inline double max_abs(std::span<const Tensor* const> params) {
  double m = 0.0;
  for (const Tensor* p : params) {
    for (double w : p->storage()) m = std::max(m, std::fabs(w));
  }
  return m;
}

}  // namespace mhgan

#endif  // MHGAN_NUMCORE_OPTIMIZER_HPP_
