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

#ifndef MHGAN_EVALUATOR_PREDICTORS_HPP_
#define MHGAN_EVALUATOR_PREDICTORS_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mhgan/errors.hpp"
#include "mhgan/numcore/tensor.hpp"

namespace mhgan {

inline constexpr std::size_t kMinTrainingRows = 10;

class Regressor {
 public:
  virtual ~Regressor() = default;
  virtual std::string name() const = 0;
  virtual void fit(const Tensor& x, std::span<const double> y) = 0;
  virtual std::vector<double> predict(const Tensor& x) const = 0;

 protected:
  static void check_training(const Tensor& x, std::span<const double> y,
                             std::size_t min_rows) {
    if (x.rank() != 2 || x.rows() != y.size()) {
      throw DimensionError("regressor: feature rows and targets disagree");
    }
    if (x.rows() < min_rows) {
      throw DataError("regressor: need at least " + std::to_string(min_rows) +
                      " training rows, got " + std::to_string(x.rows()));
    }
  }
};

// Brute-force k-nearest-neighbour regressor (Euclidean, uniform weights).
// Distance ties resolve to the lower training index.
class KnnRegressor final : public Regressor {
 public:
  explicit KnnRegressor(std::size_t k = 5) : k_(k) {}

  std::string name() const override { return "knn"; }

  void fit(const Tensor& x, std::span<const double> y) override {
    check_training(x, y, 1);
    x_ = x;
    y_.assign(y.begin(), y.end());
  }

  std::vector<double> predict(const Tensor& x) const override {
    if (x.cols() != x_.cols()) throw DimensionError("knn: feature width mismatch");
    const std::size_t n = x_.rows();
    const std::size_t k = std::min(k_, n);
    std::vector<std::pair<double, std::size_t>> dist(n);
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      auto q = x.row(r);
      for (std::size_t i = 0; i < n; ++i) {
        auto t = x_.row(i);
        double s = 0.0;
        for (std::size_t c = 0; c < q.size(); ++c) {
          const double d = q[c] - t[c];
          s += d * d;
        }
        dist[i] = {s, i};
      }
      std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(k),
                        dist.end());
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) sum += y_[dist[i].second];
      out[r] = sum / static_cast<double>(k);
    }
    return out;
  }

 private:
  std::size_t k_;
  Tensor x_;
  std::vector<double> y_;
};

// CART regression tree with variance-reduction splits.
class DecisionTreeRegressor final : public Regressor {
 public:
  DecisionTreeRegressor(std::size_t max_depth = 6, std::size_t min_leaf = 5)
      : max_depth_(max_depth), min_leaf_(min_leaf) {}

  std::string name() const override { return "tree"; }

  void fit(const Tensor& x, std::span<const double> y) override {
    check_training(x, y, 1);
    nodes_.clear();
    width_ = x.cols();
    std::vector<std::size_t> idx(x.rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    build(x, y, idx, 0);
  }

  std::vector<double> predict(const Tensor& x) const override {
    if (nodes_.empty()) throw StateError("tree: predict before fit");
    if (x.cols() != width_) throw DimensionError("tree: feature width mismatch");
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      std::size_t n = 0;
      while (!nodes_[n].leaf) {
        n = x.at(r, nodes_[n].feature) <= nodes_[n].threshold ? nodes_[n].left
                                                               : nodes_[n].right;
      }
      out[r] = nodes_[n].value;
    }
    return out;
  }

  // Smallest training-sample count over all leaves.
  std::size_t min_leaf_size() const {
    std::size_t m = static_cast<std::size_t>(-1);
    for (const Node& n : nodes_) {
      if (n.leaf) m = std::min(m, n.count);
    }
    return m;
  }
  std::size_t depth() const { return depth_; }

 private:
  struct Node {
    bool leaf = true;
    std::size_t feature = 0;
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    double value = 0.0;
    std::size_t count = 0;
  };

  std::size_t build(const Tensor& x, std::span<const double> y,
                    std::vector<std::size_t>& idx, std::size_t depth) {
    depth_ = std::max(depth_, depth);
    const std::size_t n = idx.size();
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i : idx) {
      sum += y[i];
      sumsq += y[i] * y[i];
    }
    const std::size_t id = nodes_.size();
    nodes_.push_back({});
    nodes_[id].value = sum / static_cast<double>(n);
    nodes_[id].count = n;
    const double parent_sse = sumsq - sum * sum / static_cast<double>(n);
    if (depth >= max_depth_ || n < 2 * min_leaf_ || parent_sse <= 1e-12) {
      return id;
    }

    double best_gain = 1e-12;
    std::size_t best_feature = 0;
    double best_threshold = 0.0;
    bool found = false;
    std::vector<std::size_t> order = idx;
    for (std::size_t f = 0; f < x.cols(); ++f) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double xa = x.at(a, f), xb = x.at(b, f);
        return xa < xb || (xa == xb && a < b);
      });
      double ls = 0.0, lsq = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double yi = y[order[i]];
        ls += yi;
        lsq += yi * yi;
        const std::size_t nl = i + 1;
        const std::size_t nr = n - nl;
        if (nl < min_leaf_ || nr < min_leaf_) continue;
        const double xl = x.at(order[i], f);
        const double xr = x.at(order[i + 1], f);
        if (!(xl < xr)) continue;
        const double rs = sum - ls, rsq = sumsq - lsq;
        const double sse = (lsq - ls * ls / static_cast<double>(nl)) +
                           (rsq - rs * rs / static_cast<double>(nr));
        const double gain = parent_sse - sse;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = 0.5 * (xl + xr);
          if (best_threshold >= xr) best_threshold = xl;
          found = true;
        }
      }
    }
    if (!found) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) {
      (x.at(i, best_feature) <= best_threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    const std::size_t l = build(x, y, left, depth + 1);
    const std::size_t r = build(x, y, right, depth + 1);
    nodes_[id].leaf = false;
    nodes_[id].feature = best_feature;
    nodes_[id].threshold = best_threshold;
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  std::size_t max_depth_;
  std::size_t min_leaf_;
  std::size_t width_ = 0;
  std::size_t depth_ = 0;
  std::vector<Node> nodes_;
};

// Linear model trained on the epsilon-insensitive loss by full-batch
// subgradient descent, warm-started at the (lightly ridged) least-squares
// fit. Stands in for a support-vector regressor.
class LinearEpsilonRegressor final : public Regressor {
 public:
  LinearEpsilonRegressor(double epsilon = 0.05, std::size_t epochs = 500,
                         double step = 0.1)
      : epsilon_(epsilon), epochs_(epochs), step_(step) {}

  std::string name() const override { return "linear_eps"; }

  void fit(const Tensor& x, std::span<const double> y) override {
    check_training(x, y, 1);
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    Eigen::MatrixXd a(n, d + 1);
    Eigen::VectorXd b(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < d; ++c) a(r, c) = x.at(r, c);
      a(r, d) = 1.0;
      b(r) = y[r];
    }
    Eigen::MatrixXd gram = a.transpose() * a;
    gram.diagonal().array() += 1e-8 * static_cast<double>(n);
    Eigen::VectorXd wb = gram.ldlt().solve(a.transpose() * b);
    if (!wb.allFinite()) wb.setZero();

    Eigen::VectorXd grad(d + 1);
    for (std::size_t t = 0; t < epochs_; ++t) {
      const Eigen::VectorXd residual = b - a * wb;
      grad.setZero();
      std::size_t active = 0;
      for (std::size_t r = 0; r < n; ++r) {
        const double e = residual(r);
        if (std::fabs(e) > epsilon_) {
          grad -= (e > 0.0 ? 1.0 : -1.0) * a.row(r).transpose();
          ++active;
        }
      }
      if (active == 0) break;
      grad /= static_cast<double>(n);
      wb -= (step_ / std::sqrt(static_cast<double>(t + 1))) * grad;
    }
    weights_.assign(wb.data(), wb.data() + d);
    bias_ = wb(d);
  }

  std::vector<double> predict(const Tensor& x) const override {
    if (x.cols() != weights_.size()) {
      throw DimensionError("linear_eps: feature width mismatch");
    }
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      double s = bias_;
      for (std::size_t c = 0; c < weights_.size(); ++c) s += weights_[c] * x.at(r, c);
      out[r] = s;
    }
    return out;
  }

  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  double epsilon_;
  std::size_t epochs_;
  double step_;
  std::vector<double> weights_;
  double bias_ = 0.0;
};

inline double mean_absolute_error(std::span<const double> truth,
                                  std::span<const double> pred) {
  if (truth.size() != pred.size() || truth.empty()) {
    throw DimensionError("mae: length mismatch or empty");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) s += std::fabs(truth[i] - pred[i]);
  return s / static_cast<double>(truth.size());
}

struct FittedPredictors {
  std::vector<std::unique_ptr<Regressor>> models;
};

// KNN (k=5), tree (depth 6, min leaf 5) and the linear epsilon model.
inline FittedPredictors fit_predictors(const Tensor& train,
                                       std::size_t target_col) {
  if (train.rank() != 2 || target_col >= train.cols()) {
    throw DimensionError("fit_predictors: target column out of range");
  }
  if (train.rows() < kMinTrainingRows) {
    throw DataError("fit_predictors: need at least " +
                    std::to_string(kMinTrainingRows) + " rows, got " +
                    std::to_string(train.rows()));
  }
  if (train.cols() < 2) {
    throw DataError("fit_predictors: no input features besides the target");
  }
  std::vector<std::size_t> inputs;
  for (std::size_t c = 0; c < train.cols(); ++c) {
    if (c != target_col) inputs.push_back(c);
  }
  const Tensor x = select_columns(train, inputs);
  const std::vector<double> y = column(train, target_col);
  FittedPredictors out;
  out.models.push_back(std::make_unique<KnnRegressor>());
  out.models.push_back(std::make_unique<DecisionTreeRegressor>());
  out.models.push_back(std::make_unique<LinearEpsilonRegressor>());
  for (auto& m : out.models) m->fit(x, y);
  return out;
}

}  // namespace mhgan

#endif  // MHGAN_EVALUATOR_PREDICTORS_HPP_
