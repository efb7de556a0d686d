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

#ifndef MHGAN_DATAPIPE_KMEANS_HPP_
#define MHGAN_DATAPIPE_KMEANS_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mhgan/datapipe/dataset.hpp"
#include "mhgan/errors.hpp"
#include "mhgan/numcore/random.hpp"
#include "mhgan/numcore/tensor.hpp"

namespace mhgan {

inline constexpr std::size_t kKmeansMaxIterations = 300;
inline constexpr std::size_t kKmeansRestarts = 5;

struct ClusteringResult {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;
  Tensor centroids;
  double inertia = 0.0;
  // Inertia after each Lloyd iteration of the winning restart.
  std::vector<double> iteration_inertia;
  // (k_candidate, inertia); filled by select_k_elbow().
  std::vector<std::pair<std::size_t, double>> inertia_curve;

  std::vector<std::size_t> cluster_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t a : assignments) ++sizes[a];
    return sizes;
  }
};

namespace detail {

inline double squared_distance(std::span<const double> a,
                               std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline std::size_t nearest_centroid(std::span<const double> x,
                                    const Tensor& centroids, double* dist) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const double d = squared_distance(x, centroids.row(c));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (dist) *dist = best_d;
  return best;
}

// k-means++ seeding.
inline Tensor plus_plus_init(const Tensor& data, std::size_t k, Rng& rng) {
  const std::size_t n = data.rows();
  Tensor centroids = Tensor::matrix(k, data.cols());
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  std::size_t pick = first(rng);
  std::copy(data.row(pick).begin(), data.row(pick).end(),
            centroids.row(0).begin());
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(data.row(i), centroids.row(c - 1)));
      total += d2[i];
    }
    if (total <= 0.0) {
      pick = first(rng);
    } else {
      const double target = unit(rng) * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    }
    std::copy(data.row(pick).begin(), data.row(pick).end(),
              centroids.row(c).begin());
  }
  return centroids;
}

// Moves the point farthest from its centroid in the largest cluster into
// each empty cluster.
inline void repair_empty_clusters(const Tensor& data, Tensor& centroids,
                                  std::vector<std::size_t>& assign) {
  const std::size_t k = centroids.rows();
  while (true) {
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t a : assign) ++sizes[a];
    auto empty = std::find(sizes.begin(), sizes.end(), std::size_t{0});
    if (empty == sizes.end()) return;
    const std::size_t target = static_cast<std::size_t>(empty - sizes.begin());
    const std::size_t largest = static_cast<std::size_t>(
        std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < assign.size(); ++i) {
      if (assign[i] != largest) continue;
      const double d = squared_distance(data.row(i), centroids.row(largest));
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    assign[far] = target;
    std::copy(data.row(far).begin(), data.row(far).end(),
              centroids.row(target).begin());
  }
}

inline void update_centroids(const Tensor& data,
                             const std::vector<std::size_t>& assign,
                             Tensor& centroids) {
  const std::size_t k = centroids.rows();
  std::vector<std::size_t> counts(k, 0);
  centroids.fill(0.0);
  for (std::size_t i = 0; i < assign.size(); ++i) {
    ++counts[assign[i]];
    auto src = data.row(i);
    auto dst = centroids.row(assign[i]);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (double& v : centroids.row(c)) v /= static_cast<double>(counts[c]);
  }
}

inline double total_inertia(const Tensor& data,
                            const std::vector<std::size_t>& assign,
                            const Tensor& centroids) {
  double s = 0.0;
  for (std::size_t i = 0; i < assign.size(); ++i) {
    s += squared_distance(data.row(i), centroids.row(assign[i]));
  }
  return s;
}

}  // namespace detail

// Lloyd iterations from the given starting centroids until the assignment
// is a fixpoint or the iteration cap is reached.
inline ClusteringResult lloyd(const Tensor& data, Tensor centroids) {
  const std::size_t n = data.rows();
  const std::size_t k = centroids.rows();
  ClusteringResult result;
  result.k = k;
  std::vector<std::size_t> assign(n, 0);
  std::vector<std::size_t> previous;
  for (std::size_t iter = 0; iter < kKmeansMaxIterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      assign[i] = detail::nearest_centroid(data.row(i), centroids, nullptr);
    }
    detail::repair_empty_clusters(data, centroids, assign);
    if (assign == previous) break;
    detail::update_centroids(data, assign, centroids);
    result.iteration_inertia.push_back(
        detail::total_inertia(data, assign, centroids));
    previous = assign;
  }
  result.assignments = std::move(assign);
  result.centroids = std::move(centroids);
  result.inertia = result.iteration_inertia.empty()
                       ? detail::total_inertia(data, result.assignments,
                                               result.centroids)
                       : result.iteration_inertia.back();
  return result;
}

// Best of `restarts` seeded k-means++ / Lloyd runs. Ties go to the earliest
// restart.
inline ClusteringResult kmeans(const Tensor& data, std::size_t k,
                               std::uint64_t seed,
                               std::size_t restarts = kKmeansRestarts) {
  if (data.rank() != 2 || data.rows() == 0) {
    throw DimensionError("kmeans: expected a non-empty rank-2 matrix");
  }
  if (k < 1 || k > data.rows()) {
    throw ArgumentError("kmeans: k=" + std::to_string(k) +
                        " outside [1, n_samples=" + std::to_string(data.rows()) +
                        "]");
  }
  ClusteringResult best;
  bool have = false;
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    Rng rng(derive_seed(seed, r));
    ClusteringResult candidate = lloyd(data, detail::plus_plus_init(data, k, rng));
    if (!have || candidate.inertia < best.inertia) {
      best = std::move(candidate);
      have = true;
    }
  }
  return best;
}

inline ClusteringResult kmeans(const Dataset& d, std::size_t k,
                               std::uint64_t seed) {
  return kmeans(d.rows, k, seed);
}

struct ElbowResult {
  std::size_t k = 1;
  std::vector<std::pair<std::size_t, double>> inertia_curve;
  std::vector<ClusteringResult> clusterings;  // index k-1

  const ClusteringResult& selected() const { return clusterings[k - 1]; }
};

// Relative inertia improvement when going from k-1 to k clusters.
inline double relative_improvement(double previous, double current) {
  if (previous <= 0.0) return 0.0;
  return (previous - current) / previous;
}

// Computes the inertia curve for k = 1..k_max and returns the last k before
// the relative improvement first drops below `threshold` (k_max if it never
// does). Each k also tries a warm start from the (k-1) solution plus the
// worst-fit point, which keeps the curve non-increasing.
inline ElbowResult select_k_elbow(const Tensor& data, std::size_t k_max,
                                  double threshold, std::uint64_t seed) {
  if (k_max < 2) throw ArgumentError("select_k_elbow: k_max must be >= 2");
  if (k_max > data.rows()) {
    throw ArgumentError("select_k_elbow: k_max=" + std::to_string(k_max) +
                        " exceeds n_samples=" + std::to_string(data.rows()));
  }
  ElbowResult out;
  for (std::size_t k = 1; k <= k_max; ++k) {
    ClusteringResult best = kmeans(data, k, derive_seed(seed, 1000 + k));
    if (k > 1) {
      const ClusteringResult& prev = out.clusterings.back();
      std::size_t worst = 0;
      double worst_d = -1.0;
      for (std::size_t i = 0; i < data.rows(); ++i) {
        const double d = detail::squared_distance(
            data.row(i), prev.centroids.row(prev.assignments[i]));
        if (d > worst_d) {
          worst_d = d;
          worst = i;
        }
      }
      Tensor init = Tensor::matrix(k, data.cols());
      std::copy(prev.centroids.storage().begin(), prev.centroids.storage().end(),
                init.storage().begin());
      std::copy(data.row(worst).begin(), data.row(worst).end(),
                init.row(k - 1).begin());
      ClusteringResult warm = lloyd(data, std::move(init));
      if (warm.inertia < best.inertia) best = std::move(warm);
    }
    out.inertia_curve.emplace_back(k, best.inertia);
    out.clusterings.push_back(std::move(best));
  }
  out.k = k_max;
  for (std::size_t k = 2; k <= k_max; ++k) {
    const double gain = relative_improvement(out.inertia_curve[k - 2].second,
                                             out.inertia_curve[k - 1].second);
    if (gain < threshold) {
      out.k = k - 1;
      break;
    }
  }
  for (auto& c : out.clusterings) c.inertia_curve = out.inertia_curve;
  return out;
}

struct Partition {
  Dataset data;
  std::vector<std::size_t> source_rows;
};

// Splits a dataset into one dataset per cluster; row order within each
// partition follows the original order.
inline std::vector<Partition> partition(const Dataset& d,
                                        const ClusteringResult& clustering) {
  if (clustering.assignments.size() != d.n_samples()) {
    throw DimensionError("partition: clustering covers " +
                         std::to_string(clustering.assignments.size()) +
                         " rows but dataset has " +
                         std::to_string(d.n_samples()));
  }
  std::vector<std::vector<std::size_t>> members(clustering.k);
  for (std::size_t i = 0; i < clustering.assignments.size(); ++i) {
    const std::size_t a = clustering.assignments[i];
    if (a >= clustering.k) {
      throw DimensionError("partition: assignment out of range");
    }
    members[a].push_back(i);
  }
  std::vector<Partition> parts;
  for (auto& rows : members) {
    Partition p;
    p.data = d;
    p.data.rows = select_rows(d.rows, rows);
    p.source_rows = std::move(rows);
    parts.push_back(std::move(p));
  }
  return parts;
}

inline nlohmann::json clustering_summary(const ClusteringResult& c) {
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& [k, inertia] : c.inertia_curve) {
    curve.push_back({{"k", k}, {"inertia", inertia}});
  }
  return {{"k", c.k}, {"inertia_curve", curve}, {"cluster_sizes", c.cluster_sizes()}};
}

}  // namespace mhgan

#endif  // MHGAN_DATAPIPE_KMEANS_HPP_
