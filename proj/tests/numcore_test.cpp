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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <utility>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "mhgan/errors.hpp"
#include "mhgan/numcore/activation.hpp"
#include "mhgan/numcore/checkpoint.hpp"
#include "mhgan/numcore/network.hpp"
#include "mhgan/numcore/optimizer.hpp"
#include "mhgan/numcore/random.hpp"
#include "mhgan/numcore/tensor.hpp"
#include "support/oracles.hpp"

namespace mhgan {
namespace {

Network single_dense(std::size_t in, std::size_t out, Activation act,
                     std::vector<double> weight, std::vector<double> bias) {
  const LayerSpec s = LayerSpec::dense(in, out, act);
  return Network({Layer{s, Tensor(s.weight_shape(), std::move(weight)),
                        Tensor(s.bias_shape(), std::move(bias))}});
}

double central_difference(double (*f)(double), double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

TEST(Tensor, ShapeMustMatchData) {
  EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5)), DimensionError);
  const Tensor t({2, 3}, std::vector<double>(6, 1.0));
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
}

TEST(Symlog, ValuesAtReferencePoints) {
  EXPECT_EQ(symlog(0.0), 0.0);
  EXPECT_NEAR(symlog(1.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(symlog(1.0), 0.693147, 1e-6);
  EXPECT_NEAR(symlog(-3.0), -1.386294, 1e-6);
}

TEST(Symlog, GradientAtReferencePoints) {
  EXPECT_EQ(symlog_grad(0.0), 1.0);
  EXPECT_DOUBLE_EQ(symlog_grad(1.0), 0.5);
  EXPECT_DOUBLE_EQ(symlog_grad(-3.0), 0.25);
  EXPECT_NEAR(central_difference(symlog, 1.0, 1e-6), 0.5, 1e-8);
  EXPECT_NEAR(central_difference(symlog, -3.0, 1e-6), 0.25, 1e-8);
}

TEST(Symlog, OddMonotoneAndContractive) {
  Rng rng(11);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  std::vector<double> xs;
  for (int i = 0; i < 5000; ++i) {
    const double x = u(rng) * std::pow(10.0, -static_cast<double>(i % 12));
    xs.push_back(x);
    EXPECT_EQ(symlog(-x), -symlog(x));
    EXPECT_LE(std::fabs(symlog(x)), std::fabs(x));
  }
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 1; i < xs.size(); ++i) EXPECT_LE(symlog(xs[i - 1]), symlog(xs[i]));
  EXPECT_GT(symlog(1e300), 690.0);
}

TEST(Activation, NamesRoundTrip) {
  for (Activation a : {Activation::kSymlog, Activation::kLeakyRelu, Activation::kLinear,
                       Activation::kUnitClamp}) {
    EXPECT_EQ(parse_activation(to_string(a)), a);
  }
  EXPECT_FALSE(parse_activation("tanh").has_value());
}

TEST(Activation, UnitClampStaysInUnitInterval) {
  for (double x = -50.0; x <= 50.0; x += 0.01) {
    const double y = activate(Activation::kUnitClamp, x);
    EXPECT_GE(y, 0.0);
    EXPECT_LE(y, 1.0);
  }
  EXPECT_EQ(activate(Activation::kUnitClamp, 0.0), 0.5);
}

TEST(Forward, ZeroWeightsGiveZeros) {
  const Network net = single_dense(3, 2, Activation::kSymlog, std::vector<double>(6, 0.0),
                                   std::vector<double>(2, 0.0));
  const Tensor y = net.forward(Tensor({1, 3}, {4.0, -2.0, 9.0}));
  EXPECT_EQ(y, Tensor({1, 2}, {0.0, 0.0}));
}

TEST(Forward, IdentityLayer) {
  const Network net = single_dense(3, 3, Activation::kLinear,
                                   {1, 0, 0, 0, 1, 0, 0, 0, 1}, {0, 0, 0});
  EXPECT_EQ(net.forward(Tensor({1, 3}, {1.0, 2.0, 3.0})), Tensor({1, 3}, {1.0, 2.0, 3.0}));
}

TEST(Forward, AllOnesDotProduct) {
  const Network net = single_dense(3, 1, Activation::kLinear, {1, 1, 1}, {0});
  EXPECT_EQ(net.forward(Tensor({1, 3}, {1.0, 2.0, 3.0})), Tensor({1, 1}, {6.0}));
}

TEST(Forward, WidthMismatchNamesLayer) {
  const Network net = single_dense(3, 1, Activation::kLinear, {1, 1, 1}, {0});
  try {
    net.forward(Tensor({1, 2}, {1.0, 2.0}));
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("layer 0"), std::string::npos);
  }
}

TEST(Forward, IsBitwisePure) {
  Rng rng(3);
  const Network net({LayerSpec::conv1d(9, 3, 2, Activation::kSymlog),
                     LayerSpec::dense(14, 5, Activation::kLeakyRelu),
                     LayerSpec::dense(5, 1, Activation::kLinear)},
                    rng);
  const Tensor x = normal_matrix(rng, 7, 9);
  EXPECT_EQ(net.forward(x), net.forward(x));
  EXPECT_EQ(net.forward(x), net.output(net.forward_traced(x)));
}

TEST(Conv1d, ValidPaddingByHand) {
  const LayerSpec s = LayerSpec::conv1d(4, 2, 1, Activation::kLinear);
  ASSERT_EQ(s.output_width, 3u);
  const Network net({Layer{s, Tensor({1, 2}, {1.0, -1.0}), Tensor({1}, {0.5})}});
  EXPECT_EQ(net.forward(Tensor({1, 4}, {1.0, 3.0, 2.0, 7.0})),
            Tensor({1, 3}, {-1.5, 1.5, -4.5}));
}

TEST(LayerSpec, RejectsBadKernel) {
  EXPECT_THROW(LayerSpec::conv1d(3, 4, 1, Activation::kLinear).validate(), ArgumentError);
  EXPECT_THROW(LayerSpec::dense(0, 2, Activation::kLinear).validate(), ArgumentError);
}

TEST(Backward, ZeroUpstreamGivesZeroGradients) {
  Rng rng(5);
  const Network net({LayerSpec::dense(4, 3, Activation::kSymlog),
                     LayerSpec::dense(3, 2, Activation::kLinear)},
                    rng);
  const Tape t = net.forward_traced(normal_matrix(rng, 3, 4));
  const Gradients g = net.backward(t, Tensor({3, 2}));
  for (const Tensor& p : g.params) {
    for (double v : p.storage()) EXPECT_EQ(v, 0.0);
  }
}

TEST(Backward, LinearScalarLayer) {
  const Network net = single_dense(1, 1, Activation::kLinear, {0.7}, {0.0});
  const Tape t = net.forward_traced(Tensor({1, 1}, {2.0}));
  const Gradients g = net.backward(t, Tensor({1, 1}, {1.0}));
  EXPECT_EQ(g.params[0][0], 2.0);
  EXPECT_EQ(g.params[1][0], 1.0);
  EXPECT_DOUBLE_EQ(g.input[0], 0.7);
}

TEST(Backward, RequiresMatchingForward) {
  Rng rng(1);
  const Network net({LayerSpec::dense(2, 2, Activation::kLinear)}, rng);
  EXPECT_THROW(net.backward(Tape{}, Tensor({1, 2})), StateError);
  const Network deeper({LayerSpec::dense(2, 2, Activation::kLinear),
                        LayerSpec::dense(2, 2, Activation::kLinear)},
                       rng);
  const Tape t = net.forward_traced(Tensor({1, 2}, {1.0, 2.0}));
  EXPECT_THROW(deeper.backward(t, Tensor({1, 2})), StateError);
  EXPECT_THROW(net.backward(t, Tensor({2, 2})), DimensionError);
}

TEST(Backward, TwoLayerSymlogSeed42MatchesFiniteDifferences) {
  Rng rng(42);
  const Network net({LayerSpec::dense(5, 4, Activation::kSymlog),
                     LayerSpec::dense(4, 1, Activation::kLinear)},
                    rng, 0.5);
  oracle::GradCheckCase c{net, normal_matrix(rng, 3, 5), normal_matrix(rng, 3, 1)};
  const auto r = oracle::finite_difference_check(c);
  EXPECT_LT(r.max_param_error, 1e-4);
  EXPECT_LT(r.max_input_error, 1e-4);
}

class GradientOracle
    : public ::testing::TestWithParam<std::tuple<LayerKind, Activation>> {};

TEST_P(GradientOracle, MatchesCentralDifferencesOnTwentySeeds) {
  const auto [kind, act] = GetParam();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto c = oracle::make_gradcheck_case(kind, act, seed);
    const auto r = oracle::finite_difference_check(c);
    EXPECT_LT(r.max_param_error, 1e-4) << "seed " << seed;
    EXPECT_LT(r.max_input_error, 1e-4) << "seed " << seed;
  }
}

INSTANTIATE_TEST_SUITE_P(
    AllLayers, GradientOracle,
    ::testing::Combine(::testing::Values(LayerKind::kDense, LayerKind::kConv1d),
                       ::testing::Values(Activation::kSymlog, Activation::kLeakyRelu,
                                         Activation::kLinear, Activation::kUnitClamp)));

TEST(Optimizer, ZeroGradientLeavesAdamParametersUnchanged) {
  Tensor p({3}, {0.1, -0.2, 0.3});
  const Tensor before = p;
  Tensor* params[] = {&p};
  Optimizer opt({OptimizerKind::kAdam, 0.0002}, std::span<Tensor* const>(params));
  const std::vector<Tensor> grads = {Tensor({3})};
  for (int i = 0; i < 5; ++i) opt.step(params, grads);
  EXPECT_EQ(p, before);
  EXPECT_EQ(opt.step_count(), 5);
}

TEST(Optimizer, RmspropStepMatchesTextbookUpdate) {
  Tensor p({1}, {0.5});
  Tensor* params[] = {&p};
  Optimizer opt({OptimizerKind::kRmsprop, 0.0002}, std::span<Tensor* const>(params));
  opt.step(params, std::vector<Tensor>{Tensor({1}, {1.0})});
  // v = 0.1, step = lr / (sqrt(0.1) + eps).
  const double expected = 0.5 - 0.0002 / (std::sqrt(0.1) + 1e-8);
  EXPECT_DOUBLE_EQ(p[0], expected);
  EXPECT_LT(p[0], 0.5);
}

TEST(Optimizer, TwoAdamStepsMoveAgainstGradient) {
  Tensor p({2}, {0.0, 0.0});
  Tensor* params[] = {&p};
  Optimizer opt({OptimizerKind::kAdam, 0.01}, std::span<Tensor* const>(params));
  const std::vector<Tensor> g = {Tensor({2}, {2.0, -0.5})};
  opt.step(params, g);
  const Tensor first = p;
  opt.step(params, g);
  // A constant gradient gives bias-corrected steps of lr * g / (|g| + eps').
  EXPECT_NEAR(first[0], -0.01, 1e-9);
  EXPECT_NEAR(first[1], 0.01, 1e-9);
  EXPECT_NEAR(p[0], -0.02, 1e-9);
  EXPECT_NEAR(p[1], 0.02, 1e-9);
}

TEST(Optimizer, RejectsShapeMismatchAndBadRate) {
  Tensor p({2});
  Tensor* params[] = {&p};
  Optimizer opt({OptimizerKind::kAdam, 0.001}, std::span<Tensor* const>(params));
  EXPECT_THROW(opt.step(params, std::vector<Tensor>{Tensor({3})}), DimensionError);
  EXPECT_THROW(Optimizer({OptimizerKind::kAdam, 0.0}, std::span<Tensor* const>(params)),
               ArgumentError);
}

TEST(ClipWeights, ClampsOnlyOutsideEntries) {
  Tensor w({3}, {0.07, -0.20, 0.01});
  Tensor* params[] = {&w};
  clip_weights(params, 0.05);
  EXPECT_EQ(w, Tensor({3}, {0.05, -0.05, 0.01}));
  EXPECT_THROW(clip_weights(params, 0.0), ArgumentError);
  EXPECT_THROW(clip_weights(params, -1.0), ArgumentError);
}

TEST(ClipWeights, BoundHoldsOnRandomNetworks) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    Network net({LayerSpec::conv1d(10, 3, 4, Activation::kSymlog),
                 LayerSpec::dense(32, 8, Activation::kSymlog),
                 LayerSpec::dense(8, 1, Activation::kLinear)},
                rng, 1.0);
    auto params = net.parameters();
    for (Tensor* p : params) {
      for (double& v : p->storage()) v += 0.3;
    }
    std::uniform_real_distribution<double> u(1e-3, 0.5);
    const double c = u(rng);
    clip_weights(params, c);
    const auto cparams = std::as_const(net).parameters();
    EXPECT_LE(max_abs(cparams), c);
  }
}

TEST(Checkpoint, RoundTripsBitwise) {
  Rng rng(9);
  Network net({LayerSpec::conv1d(14, 3, 4, Activation::kSymlog),
               LayerSpec::dense(48, 6, Activation::kLeakyRelu),
               LayerSpec::dense(6, 1, Activation::kUnitClamp)},
              rng);
  auto params = net.parameters();
  (*params[1])[0] = -0.0;
  (*params[3])[2] = std::numeric_limits<double>::denorm_min();
  (*params[5])[0] = 1.0 / 3.0;
  std::stringstream ss;
  write_network(ss, net);
  const Network back = read_network(ss);
  ASSERT_EQ(back.layers().size(), net.layers().size());
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    EXPECT_EQ(back.layers()[i].spec, net.layers()[i].spec);
    const auto& a = back.layers()[i].weight.storage();
    const auto& b = net.layers()[i].weight.storage();
    ASSERT_EQ(a.size(), b.size());
    EXPECT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)), 0);
    const auto& c = back.layers()[i].bias.storage();
    const auto& d = net.layers()[i].bias.storage();
    EXPECT_EQ(std::memcmp(c.data(), d.data(), c.size() * sizeof(double)), 0);
  }
}

TEST(Checkpoint, RejectsWrongVersionAndGarbage) {
  std::stringstream bad_version("mhgan-network 99\nlayers 0\n");
  EXPECT_THROW(read_network(bad_version), DataError);
  std::stringstream garbage("not a checkpoint");
  EXPECT_THROW(read_network(garbage), DataError);
  std::stringstream bad_value(
      "mhgan-network 1\nlayers 1\nlayer dense 1 1 linear 0 1\nweight 1 zz\nbias 1 0x0p+0\n");
  EXPECT_THROW(read_network(bad_value), DataError);
}

TEST(Random, DerivedSeedsAreDeterministicAndDistinct) {
  EXPECT_EQ(derive_seed(7, 1), derive_seed(7, 1));
  EXPECT_NE(derive_seed(7, 1), derive_seed(7, 2));
  EXPECT_NE(derive_seed(7, 1), derive_seed(8, 1));
  Rng a(derive_seed(7, 1));
  Rng b(derive_seed(7, 1));
  EXPECT_EQ(normal_matrix(a, 4, 4), normal_matrix(b, 4, 4));
}

}  // namespace
}  // namespace mhgan
