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

#ifndef MHGAN_NUMCORE_ACTIVATION_HPP_
#define MHGAN_NUMCORE_ACTIVATION_HPP_

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace mhgan {

// Signed logarithm: sign(x) * ln(|x| + 1). Behaves like a leaky ReLU whose
// leak is logarithmic outside [-1, 1]. Defined as 0 at the origin.
inline double symlog(double x) {
  if (x == 0.0) return 0.0;
  const double mag = std::log1p(std::fabs(x));
  return x < 0.0 ? -mag : mag;
}

inline double symlog_grad(double x) { return 1.0 / (std::fabs(x) + 1.0); }

inline constexpr double kLeakyReluSlope = 0.2;

enum class Activation {
  kSymlog,
  kLeakyRelu,
  kLinear,
  // 0.5 + symlog(x), hard-clamped to [0, 1]. Zero input maps to 0.5.
  kUnitClamp,
};

inline double activate(Activation a, double x) {
  switch (a) {
    case Activation::kSymlog:
      return symlog(x);
    case Activation::kLeakyRelu:
      return x > 0.0 ? x : kLeakyReluSlope * x;
    case Activation::kLinear:
      return x;
    case Activation::kUnitClamp: {
      const double y = 0.5 + symlog(x);
      return y < 0.0 ? 0.0 : (y > 1.0 ? 1.0 : y);
    }
  }
  return x;
}

// Derivative with respect to the pre-activation. Kinks take the right-hand
// slope for leaky ReLU; the clamp's saturated region has slope 0.
inline double activate_grad(Activation a, double x) {
  switch (a) {
    case Activation::kSymlog:
      return symlog_grad(x);
    case Activation::kLeakyRelu:
      return x >= 0.0 ? 1.0 : kLeakyReluSlope;
    case Activation::kLinear:
      return 1.0;
    case Activation::kUnitClamp: {
      const double y = 0.5 + symlog(x);
      return (y <= 0.0 || y >= 1.0) ? 0.0 : symlog_grad(x);
    }
  }
  return 1.0;
}

inline std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kSymlog:
      return "symlog";
    case Activation::kLeakyRelu:
      return "leaky_relu";
    case Activation::kLinear:
      return "linear";
    case Activation::kUnitClamp:
      return "unit_clamp";
  }
  return "?";
}

inline std::optional<Activation> parse_activation(std::string_view s) {
  if (s == "symlog") return Activation::kSymlog;
  if (s == "leaky_relu") return Activation::kLeakyRelu;
  if (s == "linear") return Activation::kLinear;
  if (s == "unit_clamp") return Activation::kUnitClamp;
  return std::nullopt;
}

}  // namespace mhgan

#endif  // MHGAN_NUMCORE_ACTIVATION_HPP_
