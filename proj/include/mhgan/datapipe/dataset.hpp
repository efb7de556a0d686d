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

#ifndef MHGAN_DATAPIPE_DATASET_HPP_
#define MHGAN_DATAPIPE_DATASET_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mhgan/errors.hpp"
#include "mhgan/numcore/tensor.hpp"

namespace mhgan {

struct FeatureBounds {
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const FeatureBounds&, const FeatureBounds&) = default;
};

// Tabular data: rows x features, with the raw per-feature bounds needed to
// map between raw and unit scale. `rows` holds raw values until normalize()
// is applied, after which every entry lies in [0, 1].
struct Dataset {
  Tensor rows;
  std::vector<std::string> feature_names;
  std::vector<FeatureBounds> feature_bounds;
  std::size_t sensitive_index = 0;
  bool normalized = false;

  std::size_t n_samples() const { return rows.empty() ? 0 : rows.rows(); }
  std::size_t n_features() const { return feature_names.size(); }

  // Column indices other than the sensitive one, in order.
  std::vector<std::size_t> nonsensitive_columns() const {
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < n_features(); ++j) {
      if (j != sensitive_index) cols.push_back(j);
    }
    return cols;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

inline std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

inline std::vector<FeatureBounds> compute_bounds(const Tensor& rows) {
  std::vector<FeatureBounds> bounds(rows.cols(),
                                    {std::numeric_limits<double>::infinity(),
                                     -std::numeric_limits<double>::infinity()});
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    for (std::size_t c = 0; c < rows.cols(); ++c) {
      bounds[c].min = std::min(bounds[c].min, rows.at(r, c));
      bounds[c].max = std::max(bounds[c].max, rows.at(r, c));
    }
  }
  return bounds;
}

}  // namespace detail

inline std::size_t resolve_column(const std::vector<std::string>& names,
                                  const std::string& name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw DataError("unknown column '" + name + "'");
  }
  return static_cast<std::size_t>(it - names.begin());
}

// Parses a comma-separated table from a stream. Data rows are numbered from
// 1 in error messages (the header is not counted).
inline Dataset parse_csv(std::istream& in, const std::string& sensitive_column,
                         const std::string& source = "<stream>") {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(source + ": empty file, expected a header row");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  Dataset d;
  for (auto cell : detail::split_csv_line(line)) {
    if (cell.empty()) throw DataError(source + ": empty column name in header");
    d.feature_names.emplace_back(cell);
  }
  const std::size_t cols = d.feature_names.size();
  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row;
    auto cells = detail::split_csv_line(line);
    if (cells.size() != cols) {
      throw DataError(source + ": row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      auto v = detail::parse_number(cells[c]);
      if (!v) {
        throw DataError(source + ": row " + std::to_string(row) + ", column " +
                        std::to_string(c + 1) + " ('" + d.feature_names[c] +
                        "'): cannot parse '" + std::string(cells[c]) +
                        "' as a number");
      }
      values.push_back(*v);
    }
  }
  d.rows = Tensor({row, cols}, std::move(values));
  d.feature_bounds = detail::compute_bounds(d.rows);
  if (!sensitive_column.empty()) {
    d.sensitive_index = resolve_column(d.feature_names, sensitive_column);
  }
  return d;
}

inline Dataset load_csv(const std::string& path,
                        const std::string& sensitive_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  Dataset d = parse_csv(in, sensitive_column, path);
  if (d.n_samples() < 2) {
    throw DataError(path + ": need at least 2 data rows, found " +
                    std::to_string(d.n_samples()));
  }
  return d;
}

// Min-max scales every feature to [0, 1] using the recorded raw bounds.
// Constant features map to 0.5. A dataset that is already normalized is
// returned unchanged.
inline Dataset normalize(const Dataset& d,
                         std::vector<std::string>* warnings = nullptr) {
  if (d.normalized) return d;
  Dataset out = d;
  for (std::size_t c = 0; c < d.n_features(); ++c) {
    const FeatureBounds b = d.feature_bounds[c];
    const double span = b.max - b.min;
    if (span == 0.0 && warnings) {
      warnings->push_back("feature '" + d.feature_names[c] +
                          "' is constant; normalized to 0.5");
    }
    for (std::size_t r = 0; r < d.n_samples(); ++r) {
      double& v = out.rows.at(r, c);
      v = span == 0.0 ? 0.5 : std::clamp((v - b.min) / span, 0.0, 1.0);
    }
  }
  out.normalized = true;
  return out;
}

// Maps unit-scale rows back to raw scale.
inline Tensor denormalize(const Tensor& unit_rows,
                          const std::vector<FeatureBounds>& bounds) {
  if (unit_rows.cols() != bounds.size()) {
    throw DimensionError("denormalize: " + std::to_string(unit_rows.cols()) +
                         " columns but " + std::to_string(bounds.size()) +
                         " bounds");
  }
  Tensor out = unit_rows;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      const FeatureBounds b = bounds[c];
      const double span = b.max - b.min;
      double& v = out.at(r, c);
      v = span == 0.0 ? b.min : b.min + v * span;
    }
  }
  return out;
}

inline Dataset denormalize(const Dataset& d) {
  if (!d.normalized) return d;
  Dataset out = d;
  out.rows = denormalize(d.rows, d.feature_bounds);
  out.normalized = false;
  return out;
}

// Writes a header row plus values with round-trip precision.
inline void write_csv(std::ostream& out, const std::vector<std::string>& header,
                      const Tensor& rows) {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out << ',';
    out << header[c];
  }
  out << '\n';
  if (rows.empty()) return;
  out << std::setprecision(17);
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    for (std::size_t c = 0; c < rows.cols(); ++c) {
      if (c) out << ',';
      out << rows.at(r, c);
    }
    out << '\n';
  }
}

inline void save_csv(const std::string& path,
                     const std::vector<std::string>& header, const Tensor& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  write_csv(out, header, rows);
}

}  // namespace mhgan

#endif  // MHGAN_DATAPIPE_DATASET_HPP_
