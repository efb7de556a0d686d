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

#ifndef MHGAN_EVALUATOR_REPORT_HPP_
#define MHGAN_EVALUATOR_REPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mhgan/datapipe/dataset.hpp"
#include "mhgan/evaluator/emd.hpp"
#include "mhgan/evaluator/metrics.hpp"
#include "mhgan/hash.hpp"

namespace mhgan {

struct EvalConfig {
  std::uint64_t seed = 0;
  bool sliced = false;             // sliced Wasserstein instead of per-feature EMD
  std::size_t projections = 64;    // sliced mode only
};

struct FeatureStats {
  double mean = 0.0;
  double std = 0.0;
  friend bool operator==(const FeatureStats&, const FeatureStats&) = default;
};

struct EvaluationReport {
  double raw_em = 0.0;
  double inverse_em = 1.0;
  double inverse_model_mae = 0.0;
  double reid_mae = 0.0;
  std::map<std::string, double> per_model_maes;       // utility task
  std::map<std::string, double> reid_per_model_maes;  // attribute inference
  std::vector<double> per_feature_em;
  // Correlation of each feature with the sensitive column in the real data
  // and in the synthetic data. Undefined coefficients are reported as 0 and
  // listed in `undefined_corr`.
  std::vector<double> per_feature_corr;
  std::vector<double> per_feature_corr_synth;
  std::vector<std::string> undefined_corr;
  std::vector<FeatureStats> real_stats;
  std::vector<FeatureStats> synth_stats;
  // |mean_real - mean_synth| + |std_real - std_synth| per feature.
  std::vector<double> per_feature_discrepancy;
  // Spearman correlation, over non-sensitive features, between
  // |per_feature_corr| and per_feature_discrepancy.
  double corr_discrepancy_rank_corr = 0.0;
  std::vector<std::string> feature_names;
  std::size_t sensitive_index = 0;
  std::uint64_t seed = 0;
  std::string config_hash;

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

inline double inverse_em_from_raw(double raw) { return 1.0 / (1.0 + raw); }

inline std::vector<FeatureStats> feature_stats(const Tensor& m) {
  std::vector<FeatureStats> out(m.cols());
  const double n = static_cast<double>(m.rows());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) s += m.at(r, c);
    const double mean = s / n;
    double v = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const double d = m.at(r, c) - mean;
      v += d * d;
    }
    out[c] = {mean, std::sqrt(v / n)};
  }
  return out;
}

inline std::string eval_config_hash(const EvalConfig& cfg) {
  const std::string canon = "seed=" + std::to_string(cfg.seed) +
                            ";sliced=" + (cfg.sliced ? "1" : "0") +
                            ";projections=" + std::to_string(cfg.projections);
  return hex64(fnv1a64(canon));
}

// `real` and `synth` are both on the unit scale.
inline EvaluationReport build_report(const Dataset& real, const Tensor& synth,
                                     const EvalConfig& cfg,
                                     const std::string& config_hash = "") {
  if (synth.rank() != 2 || synth.cols() != real.n_features()) {
    throw DimensionError("build_report: synthetic data has the wrong width");
  }
  if (synth.rows() == 0) throw DataError("build_report: synthetic data is empty");
  EvaluationReport r;
  r.feature_names = real.feature_names;
  r.sensitive_index = real.sensitive_index;
  r.seed = cfg.seed;
  r.config_hash = config_hash.empty() ? eval_config_hash(cfg) : config_hash;

  const FeatureEm em = mean_feature_em(real.rows, synth, derive_seed(cfg.seed, 1));
  r.per_feature_em = em.per_feature;
  r.raw_em = cfg.sliced
                 ? sliced_em(real.rows, synth, cfg.projections, derive_seed(cfg.seed, 2))
                 : em.mean;
  r.inverse_em = inverse_em_from_raw(r.raw_em);

  const UtilityResult util = inverse_model_mae(real, synth);
  r.inverse_model_mae = util.inverse;
  r.per_model_maes = util.maes.per_model;

  const ModelMaes reid = reid_mae(real, synth);
  r.reid_mae = reid.mean;
  r.reid_per_model_maes = reid.per_model;

  r.real_stats = feature_stats(real.rows);
  r.synth_stats = feature_stats(synth);
  const auto sens_real = column(real.rows, real.sensitive_index);
  const auto sens_synth = column(synth, real.sensitive_index);
  std::vector<double> abs_corr, discrepancy;
  for (std::size_t c = 0; c < real.n_features(); ++c) {
    double cr = 0.0, cs = 0.0;
    try {
      cr = pearson_corr(column(real.rows, c), sens_real);
    } catch (const ArgumentError&) {
      r.undefined_corr.push_back("real:" + real.feature_names[c]);
    }
    try {
      cs = pearson_corr(column(synth, c), sens_synth);
    } catch (const ArgumentError&) {
      r.undefined_corr.push_back("synthetic:" + real.feature_names[c]);
    }
    r.per_feature_corr.push_back(cr);
    r.per_feature_corr_synth.push_back(cs);
    const double d = std::fabs(r.real_stats[c].mean - r.synth_stats[c].mean) +
                     std::fabs(r.real_stats[c].std - r.synth_stats[c].std);
    r.per_feature_discrepancy.push_back(d);
    if (c != real.sensitive_index) {
      abs_corr.push_back(std::fabs(cr));
      discrepancy.push_back(d);
    }
  }
  try {
    r.corr_discrepancy_rank_corr = spearman_corr(abs_corr, discrepancy);
  } catch (const std::exception&) {
    r.corr_discrepancy_rank_corr = 0.0;
  }
  return r;
}

inline nlohmann::json to_json(const EvaluationReport& r) {
  nlohmann::json stats = nlohmann::json::array();
  for (std::size_t c = 0; c < r.real_stats.size(); ++c) {
    stats.push_back({{"feature", r.feature_names[c]},
                     {"real_mean", r.real_stats[c].mean},
                     {"real_std", r.real_stats[c].std},
                     {"synth_mean", r.synth_stats[c].mean},
                     {"synth_std", r.synth_stats[c].std}});
  }
  return {{"raw_em", r.raw_em},
          {"inverse_em", r.inverse_em},
          {"inverse_model_mae", r.inverse_model_mae},
          {"reid_mae", r.reid_mae},
          {"per_model_maes", r.per_model_maes},
          {"reid_per_model_maes", r.reid_per_model_maes},
          {"per_feature_em", r.per_feature_em},
          {"per_feature_corr", r.per_feature_corr},
          {"per_feature_corr_synth", r.per_feature_corr_synth},
          {"undefined_corr", r.undefined_corr},
          {"per_feature_stats", stats},
          {"per_feature_discrepancy", r.per_feature_discrepancy},
          {"corr_discrepancy_rank_corr", r.corr_discrepancy_rank_corr},
          {"feature_names", r.feature_names},
          {"sensitive_index", r.sensitive_index},
          {"seeds", {{"evaluation", r.seed}}},
          {"config_hash", r.config_hash}};
}

inline EvaluationReport report_from_json(const nlohmann::json& j) {
  EvaluationReport r;
  try {
    r.raw_em = j.at("raw_em").get<double>();
    r.inverse_em = j.at("inverse_em").get<double>();
    r.inverse_model_mae = j.at("inverse_model_mae").get<double>();
    r.reid_mae = j.at("reid_mae").get<double>();
    r.per_model_maes = j.at("per_model_maes").get<std::map<std::string, double>>();
    r.reid_per_model_maes =
        j.at("reid_per_model_maes").get<std::map<std::string, double>>();
    r.per_feature_em = j.at("per_feature_em").get<std::vector<double>>();
    r.per_feature_corr = j.at("per_feature_corr").get<std::vector<double>>();
    r.per_feature_corr_synth =
        j.at("per_feature_corr_synth").get<std::vector<double>>();
    r.undefined_corr = j.at("undefined_corr").get<std::vector<std::string>>();
    for (const auto& s : j.at("per_feature_stats")) {
      r.real_stats.push_back({s.at("real_mean").get<double>(),
                              s.at("real_std").get<double>()});
      r.synth_stats.push_back({s.at("synth_mean").get<double>(),
                               s.at("synth_std").get<double>()});
    }
    r.per_feature_discrepancy =
        j.at("per_feature_discrepancy").get<std::vector<double>>();
    r.corr_discrepancy_rank_corr = j.at("corr_discrepancy_rank_corr").get<double>();
    r.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    r.sensitive_index = j.at("sensitive_index").get<std::size_t>();
    r.seed = j.at("seeds").at("evaluation").get<std::uint64_t>();
    r.config_hash = j.at("config_hash").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
  return r;
}

// Three (axis, value) rows for a radar chart; every value in [0, 1].
inline void write_radar_csv(std::ostream& out, const EvaluationReport& r) {
  out.precision(17);
  out << "axis,value\n";
  out << "inverse_em," << r.inverse_em << '\n';
  out << "inverse_model_mae," << r.inverse_model_mae << '\n';
  out << "reid_mae," << std::min(r.reid_mae, 1.0) << '\n';
}

}  // namespace mhgan

#endif  // MHGAN_EVALUATOR_REPORT_HPP_
