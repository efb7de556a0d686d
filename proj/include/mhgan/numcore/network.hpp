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

#ifndef MHGAN_NUMCORE_NETWORK_HPP_
#define MHGAN_NUMCORE_NETWORK_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mhgan/errors.hpp"
#include "mhgan/numcore/activation.hpp"
#include "mhgan/numcore/tensor.hpp"

namespace mhgan {

namespace detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using MatrixMap = Eigen::Map<RowMatrix>;

}  // namespace detail

enum class LayerKind { kDense, kConv1d };

inline std::string_view to_string(LayerKind k) {
  return k == LayerKind::kDense ? "dense" : "conv1d";
}

// Shape description of one layer. A conv1d layer reads a single input
// channel, applies `channels` filters of width `kernel_size` with stride 1
// and no padding, and emits the filter maps concatenated channel-major:
// output_width == channels * (input_width - kernel_size + 1).
struct LayerSpec {
  LayerKind kind = LayerKind::kDense;
  std::size_t input_width = 0;
  std::size_t output_width = 0;
  Activation activation = Activation::kLinear;
  std::size_t kernel_size = 0;
  std::size_t channels = 1;

  static LayerSpec dense(std::size_t in, std::size_t out, Activation act) {
    return {LayerKind::kDense, in, out, act, 0, 1};
  }

  static LayerSpec conv1d(std::size_t in, std::size_t kernel,
                          std::size_t channels, Activation act) {
    const std::size_t positions = kernel <= in ? in - kernel + 1 : 0;
    return {LayerKind::kConv1d, in, channels * positions, act, kernel, channels};
  }

  void validate() const {
    if (input_width == 0 || output_width == 0) {
      throw ArgumentError("layer widths must be positive");
    }
    if (kind == LayerKind::kConv1d) {
      if (kernel_size < 1 || kernel_size > input_width) {
        throw ArgumentError("conv1d kernel_size must lie in [1, input_width]");
      }
      if (channels < 1 ||
          output_width != channels * (input_width - kernel_size + 1)) {
        throw ArgumentError(
            "conv1d output_width must equal channels * (input_width - "
            "kernel_size + 1)");
      }
    }
  }

  std::vector<std::size_t> weight_shape() const {
    if (kind == LayerKind::kDense) return {output_width, input_width};
    return {channels, kernel_size};
  }
  std::vector<std::size_t> bias_shape() const {
    if (kind == LayerKind::kDense) return {output_width};
    return {channels};
  }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct Layer {
  LayerSpec spec;
  Tensor weight;
  Tensor bias;
};

// Activations recorded by a traced forward pass; consumed by backward().
struct Tape {
  Tensor input;
  std::vector<Tensor> pre;   // pre-activation per layer
  std::vector<Tensor> post;  // output per layer

  bool recorded() const { return !pre.empty(); }
};

// Gradients in Network::parameters() order (weight0, bias0, weight1, ...).
struct Gradients {
  std::vector<Tensor> params;
  Tensor input;
};

inline constexpr double kDefaultInitRange = 0.05;

class Network {
 public:
  Network() = default;

  // Weights uniform in [-init_range, init_range], biases zero.
  Network(const std::vector<LayerSpec>& specs, std::mt19937_64& rng,
          double init_range = kDefaultInitRange) {
    std::uniform_real_distribution<double> uniform(-init_range, init_range);
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const LayerSpec& s = specs[i];
      s.validate();
      if (i > 0 && specs[i - 1].output_width != s.input_width) {
        throw DimensionError("layer " + std::to_string(i) + " expects width " +
                             std::to_string(s.input_width) +
                             " but previous layer emits " +
                             std::to_string(specs[i - 1].output_width));
      }
      Layer layer{s, Tensor(s.weight_shape()), Tensor(s.bias_shape())};
      for (double& w : layer.weight.storage()) w = uniform(rng);
      layers_.push_back(std::move(layer));
    }
  }

  explicit Network(std::vector<Layer> layers) : layers_(std::move(layers)) {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const Layer& l = layers_[i];
      l.spec.validate();
      if (l.weight.shape() != l.spec.weight_shape() ||
          l.bias.shape() != l.spec.bias_shape()) {
        throw DimensionError("layer " + std::to_string(i) +
                             " parameter shapes disagree with its spec");
      }
      if (i > 0 && layers_[i - 1].spec.output_width != l.spec.input_width) {
        throw DimensionError("layer " + std::to_string(i) +
                             " input width does not match previous layer");
      }
    }
  }

  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }
  bool empty() const { return layers_.empty(); }

  std::size_t input_width() const {
    return layers_.empty() ? 0 : layers_.front().spec.input_width;
  }
  std::size_t output_width() const {
    return layers_.empty() ? 0 : layers_.back().spec.output_width;
  }

  std::vector<Tensor*> parameters() {
    std::vector<Tensor*> out;
    for (Layer& l : layers_) {
      out.push_back(&l.weight);
      out.push_back(&l.bias);
    }
    return out;
  }
  std::vector<const Tensor*> parameters() const {
    std::vector<const Tensor*> out;
    for (const Layer& l : layers_) {
      out.push_back(&l.weight);
      out.push_back(&l.bias);
    }
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers_) n += l.weight.size() + l.bias.size();
    return n;
  }

  // Pure forward pass on a batch [rows x input_width].
  Tensor forward(const Tensor& input) const {
    check_input(input);
    Tensor x = input;
    for (const Layer& l : layers_) {
      Tensor pre = affine(l, x);
      for (double& v : pre.storage()) v = activate(l.spec.activation, v);
      x = std::move(pre);
    }
    return x;
  }

  // Forward pass that keeps every intermediate for backward().
  Tape forward_traced(const Tensor& input) const {
    check_input(input);
    Tape tape;
    tape.input = input;
    const Tensor* x = &tape.input;
    for (const Layer& l : layers_) {
      Tensor pre = affine(l, *x);
      Tensor post = pre;
      for (double& v : post.storage()) v = activate(l.spec.activation, v);
      tape.pre.push_back(std::move(pre));
      tape.post.push_back(std::move(post));
      x = &tape.post.back();
    }
    return tape;
  }

  const Tensor& output(const Tape& tape) const { return tape.post.back(); }

  Gradients backward(const Tape& tape, const Tensor& upstream) const {
    if (!tape.recorded() || tape.pre.size() != layers_.size()) {
      throw StateError("backward called without a matching forward pass");
    }
    if (upstream.shape() != tape.post.back().shape()) {
      throw DimensionError("upstream gradient shape " +
                           upstream.shape_string() +
                           " does not match network output " +
                           tape.post.back().shape_string());
    }
    Gradients grads;
    grads.params.resize(2 * layers_.size());
    Tensor g = upstream;
    for (std::size_t li = layers_.size(); li-- > 0;) {
      const Layer& l = layers_[li];
      const Tensor& pre = tape.pre[li];
      const Tensor& in = li == 0 ? tape.input : tape.post[li - 1];
      for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] *= activate_grad(l.spec.activation, pre[i]);
      }
      Tensor dw(l.spec.weight_shape());
      Tensor db(l.spec.bias_shape());
      Tensor dx = Tensor::matrix(in.rows(), in.cols());
      if (l.spec.kind == LayerKind::kDense) {
        dense_backward(l, in, g, dw, db, dx);
      } else {
        conv_backward(l, in, g, dw, db, dx);
      }
      grads.params[2 * li] = std::move(dw);
      grads.params[2 * li + 1] = std::move(db);
      g = std::move(dx);
    }
    grads.input = std::move(g);
    return grads;
  }

 private:
  void check_input(const Tensor& input) const {
    if (layers_.empty()) throw StateError("network has no layers");
    if (input.rank() != 2 || input.cols() != layers_.front().spec.input_width) {
      throw DimensionError("layer 0 (" +
                           std::string(to_string(layers_.front().spec.kind)) +
                           ") expects input width " +
                           std::to_string(layers_.front().spec.input_width) +
                           ", got shape " + input.shape_string());
    }
  }

  static Tensor affine(const Layer& l, const Tensor& x) {
    const std::size_t rows = x.rows();
    const LayerSpec& s = l.spec;
    Tensor y = Tensor::matrix(rows, s.output_width);
    const double* w = l.weight.storage().data();
    const double* b = l.bias.storage().data();
    if (s.kind == LayerKind::kDense) {
      detail::ConstMatrixMap xm(x.storage().data(), rows, s.input_width);
      detail::ConstMatrixMap wm(w, s.output_width, s.input_width);
      detail::MatrixMap ym(y.storage().data(), rows, s.output_width);
      ym.noalias() = xm * wm.transpose();
      ym.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(b, s.output_width);
    } else {
      const std::size_t positions = s.input_width - s.kernel_size + 1;
      for (std::size_t r = 0; r < rows; ++r) {
        const double* xr = x.storage().data() + r * s.input_width;
        double* yr = y.storage().data() + r * s.output_width;
        for (std::size_t c = 0; c < s.channels; ++c) {
          const double* wc = w + c * s.kernel_size;
          for (std::size_t p = 0; p < positions; ++p) {
            double acc = b[c];
            for (std::size_t k = 0; k < s.kernel_size; ++k) {
              acc += wc[k] * xr[p + k];
            }
            yr[c * positions + p] = acc;
          }
        }
      }
    }
    return y;
  }

  static void dense_backward(const Layer& l, const Tensor& in, const Tensor& g,
                             Tensor& dw, Tensor& db, Tensor& dx) {
    const LayerSpec& s = l.spec;
    const std::size_t rows = in.rows();
    detail::ConstMatrixMap xm(in.storage().data(), rows, s.input_width);
    detail::ConstMatrixMap gm(g.storage().data(), rows, s.output_width);
    detail::ConstMatrixMap wm(l.weight.storage().data(), s.output_width, s.input_width);
    detail::MatrixMap(dw.storage().data(), s.output_width, s.input_width).noalias() =
        gm.transpose() * xm;
    Eigen::Map<Eigen::RowVectorXd>(db.storage().data(), s.output_width) = gm.colwise().sum();
    detail::MatrixMap(dx.storage().data(), rows, s.input_width).noalias() = gm * wm;
  }

  static void conv_backward(const Layer& l, const Tensor& in, const Tensor& g,
                            Tensor& dw, Tensor& db, Tensor& dx) {
    const LayerSpec& s = l.spec;
    const std::size_t positions = s.input_width - s.kernel_size + 1;
    const double* w = l.weight.storage().data();
    for (std::size_t r = 0; r < in.rows(); ++r) {
      const double* xr = in.storage().data() + r * s.input_width;
      const double* gr = g.storage().data() + r * s.output_width;
      double* dxr = dx.storage().data() + r * s.input_width;
      for (std::size_t c = 0; c < s.channels; ++c) {
        const double* wc = w + c * s.kernel_size;
        double* dwc = dw.storage().data() + c * s.kernel_size;
        for (std::size_t p = 0; p < positions; ++p) {
          const double gp = gr[c * positions + p];
          if (gp == 0.0) continue;
          db[c] += gp;
          for (std::size_t k = 0; k < s.kernel_size; ++k) {
            dwc[k] += gp * xr[p + k];
            dxr[p + k] += gp * wc[k];
          }
        }
      }
    }
  }

  std::vector<Layer> layers_;
};

// Elementwise accumulate: into += from. Shapes must agree.
inline void accumulate(std::vector<Tensor>& into, const std::vector<Tensor>& from) {
  if (into.empty()) {
    into = from;
    return;
  }
  if (into.size() != from.size()) {
    throw DimensionError("gradient lists differ in length");
  }
  for (std::size_t i = 0; i < into.size(); ++i) {
    if (!into[i].same_shape(from[i])) {
      throw DimensionError("gradient tensor " + std::to_string(i) +
                           " shape mismatch");
    }
    for (std::size_t j = 0; j < into[i].size(); ++j) into[i][j] += from[i][j];
  }
}

}  // namespace mhgan

#endif  // MHGAN_NUMCORE_NETWORK_HPP_
