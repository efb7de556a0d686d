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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Pass criterion numbers to run a subset.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mhgan/datapipe/dataset.hpp"
#include "mhgan/datapipe/kmeans.hpp"
#include "mhgan/datapipe/toydata.hpp"
#include "mhgan/evaluator/emd.hpp"
#include "mhgan/evaluator/report.hpp"
#include "mhgan/numcore/random.hpp"
#include "mhgan/trainer/losses.hpp"
#include "mhgan/trainer/probe.hpp"
#include "mhgan/trainer/run.hpp"
#include "mhgan/trainer/trainer.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/reference_wgan.hpp"

namespace mhgan::acceptance {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool bitwise_equal(const std::vector<Tensor*>& a, const std::vector<Tensor*>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(*a[i] == *b[i])) return false;
  }
  return true;
}

std::vector<Tensor*> discriminator_parameters(Agents& a) {
  std::vector<Tensor*> out;
  for (auto& c : a.critics) {
    for (Tensor* p : c.net.parameters()) out.push_back(p);
  }
  for (auto& r : a.reids) {
    for (Tensor* p : r.net.parameters()) out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// 1. Gradient oracle.

Outcome gradient_oracle() {
  const auto t0 = Clock::now();
  const LayerKind kinds[] = {LayerKind::kDense, LayerKind::kConv1d};
  const Activation acts[] = {Activation::kSymlog, Activation::kLeakyRelu,
                             Activation::kLinear, Activation::kUnitClamp};
  double worst = 0.0;
  std::size_t cases = 0, failed = 0, entries = 0;
  for (LayerKind k : kinds) {
    for (Activation a : acts) {
      for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto c = oracle::make_gradcheck_case(k, a, seed);
        const auto r = oracle::finite_difference_check(c);
        const double e = std::max(r.max_param_error, r.max_input_error);
        worst = std::max(worst, e);
        entries += r.checked;
        ++cases;
        if (!(e < 1e-4)) ++failed;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {failed == 0 && secs < 60.0,
          std::to_string(cases - failed) + "/" + std::to_string(cases) + " cases, " +
              std::to_string(entries) + " entries, max relative error " +
              fmt("%.2e", worst) + " (limit 1e-4), " + fmt("%.1f", secs) + "s (limit 60s)"};
}

// ---------------------------------------------------------------------------
// 2. EMD oracle. Values lie on a dyadic grid so both sides sum exactly.

Outcome emd_oracle() {
  const auto t0 = Clock::now();
  Rng rng(20);
  std::uniform_int_distribution<int> grid(-256, 256);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial) % 6;
    std::vector<double> a(n), b(n);
    for (double& x : a) x = grid(rng) / 64.0;
    for (double& x : b) x = grid(rng) / 64.0;
    if (emd_1d(a, b) != oracle::brute_force_matching(a, b)) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 60.0,
          std::to_string(1000 - mismatches) + "/1000 exact matches, " + fmt("%.2f", secs) +
              "s"};
}

// ---------------------------------------------------------------------------
// 3. Combined-cost identities.

Outcome combined_identities() {
  Rng rng(30);
  std::uniform_real_distribution<double> u(-5, 5);
  std::size_t identity_failures = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> others(static_cast<std::size_t>(trial) % 8);
    for (double& o : others) o = u(rng);
    const double own = u(rng);
    double sum = 0.0;
    for (double o : others) sum += o;
    const CombinedLossBreakdown b = combined_loss(own, others);
    if (b.total != own + sum || b.lambda_sum != sum) ++identity_failures;
  }

  std::size_t runs_identical = 0, runs_with_reid = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const TrainingData d = oracle::two_cluster_data(seed);
    TrainConfig cfg = oracle::small_config(seed);
    cfg.em_gate = 10.0;
    TrainConfig own_cfg = cfg;
    own_cfg.loss_mode = LossMode::kOwn;
    Agents a = build_agents(cfg, d);
    Agents b = build_agents(own_cfg, d);
    TrainingState sa = init_state(cfg, a);
    TrainingState sb = init_state(own_cfg, b);
    for (int e = 0; e < 5; ++e) {
      train_epoch(sa, a, d, cfg);
      train_epoch(sb, b, d, own_cfg);
    }
    if (sa.reid_active[0]) ++runs_with_reid;
    if (bitwise_equal(discriminator_parameters(a), discriminator_parameters(b)) &&
        bitwise_equal(a.generator.parameters(), b.generator.parameters())) {
      ++runs_identical;
    }
  }
  return {identity_failures == 0 && runs_identical == 5 && runs_with_reid == 5,
          "total == own + sum(others) in " + std::to_string(10000 - identity_failures) +
              "/10000 cases; combined vs own bitwise identical in " +
              std::to_string(runs_identical) + "/5 five-epoch runs (reid active in " +
              std::to_string(runs_with_reid) + "/5)"};
}

// ---------------------------------------------------------------------------
// 4. Gate behavior on simulated EM trajectories.

Outcome gate_behavior() {
  Rng rng(40);
  std::uniform_int_distribution<std::size_t> heads(1, 6);
  std::uniform_int_distribution<std::size_t> length(1, 60);
  std::uniform_real_distribution<double> level(0.0, 0.8);
  std::uniform_int_distribution<int> pick(0, 9);
  const double below = std::nextafter(0.3, 0.0);
  const double above = std::nextafter(0.3, 1.0);
  std::size_t violations = 0, latched = 0, boundary_hits = 0;
  for (int traj = 0; traj < 10000; ++traj) {
    const std::size_t h = heads(rng);
    TrainingState s;
    std::vector<bool> expected(h, false);
    const std::size_t steps = length(rng);
    for (std::size_t step = 0; step < steps; ++step) {
      std::vector<double> em(h);
      for (double& v : em) {
        const int p = pick(rng);
        v = p == 0 ? 0.3 : p == 1 ? below : p == 2 ? above : level(rng);
        if (v == 0.3) ++boundary_hits;
      }
      const std::vector<bool> before = s.reid_active;
      em_gate(em, s);
      for (std::size_t i = 0; i < h; ++i) {
        expected[i] = expected[i] || em[i] < 0.3;
        if (s.reid_active[i] != expected[i]) ++violations;
        if (!before.empty() && before[i] && !s.reid_active[i]) ++violations;
      }
    }
    for (bool b : expected) latched += b ? 1 : 0;
  }
  return {violations == 0,
          "10000 trajectories, " + std::to_string(violations) + " violations, " +
              std::to_string(boundary_hits) + " readings exactly at 0.3, " +
              std::to_string(latched) + " heads latched"};
}

// ---------------------------------------------------------------------------
// 5. Single pair without re-identification reduces to a plain WGAN.

Outcome wgan_reduction() {
  std::size_t identical = 0;
  const std::uint64_t seeds[] = {9, 10, 11};
  for (std::uint64_t seed : seeds) {
    Rng data_rng(seed);
    TrainingData d;
    d.partitions.push_back(uniform_matrix(data_rng, 100, 4));
    d.sensitive_index = 3;
    TrainConfig cfg = oracle::small_config(seed);
    cfg.reid_enabled = false;
    Agents a = build_agents(cfg, d);
    oracle::ReferenceWgan ref(a.generator, a.critics[0], cfg);
    TrainingState s = init_state(cfg, a);
    for (int e = 0; e < 5; ++e) {
      train_epoch(s, a, d, cfg);
      ref.epoch(d.partitions[0], cfg);
    }
    if (a.reids.empty() &&
        bitwise_equal(a.generator.parameters(), ref.gen.parameters()) &&
        bitwise_equal(a.critics[0].net.parameters(), ref.critic.net.parameters())) {
      ++identical;
    }
  }
  return {identical == 3,
          std::to_string(identical) + "/3 seeds bitwise identical after 5 epochs"};
}

// ---------------------------------------------------------------------------
// Copycol pipeline shared by 6, 7, 9 and 10.

constexpr std::size_t kCopycolRows = 1000;
constexpr std::uint64_t kMainSeed = 7;

struct CopycolRun {
  EvaluationReport synth;
  EvaluationReport real;
  EvaluationReport noise;
  ProbeReport trained_probe;
  ProbeReport untrained_probe;
  bool probed = false;
  double pipeline_seconds = 0.0;
  double probe_seconds = 0.0;
  std::size_t k = 0;

  // Serialized artifacts compared byte for byte by criterion 10.
  std::string bytes() const {
    nlohmann::json j;
    j["synthetic"] = to_json(synth);
    j["real"] = to_json(real);
    j["noise"] = to_json(noise);
    if (probed) {
      j["probe_trained"] = to_json(trained_probe);
      j["probe_untrained"] = to_json(untrained_probe);
    }
    return j.dump(2);
  }
};

CopycolRun run_copycol(std::uint64_t seed, bool with_probe) {
  CopycolRun out;
  const auto t0 = Clock::now();
  const ToyTable t = make_copycol(kCopycolRows, seed);
  std::stringstream csv;
  write_csv(csv, t.names, t.rows);
  const Dataset raw = parse_csv(csv, t.sensitive, "copycol");
  TrainConfig cfg;
  cfg.seed = seed;
  cfg.epochs = 2000;
  const PreparedData pd = prepare_data(raw, cfg);
  out.k = pd.clustering.k;

  Agents untrained;
  if (with_probe) untrained = build_agents(cfg, pd.training);

  TrainedModel m = train_model(pd.training, cfg);
  const Tensor synth = generate_rows(m.agents.generator, pd.cluster_sizes(), kCopycolRows, seed);
  EvalConfig ec;
  ec.seed = seed;
  out.synth = build_report(pd.normalized, synth, ec);
  out.pipeline_seconds = seconds_since(t0);
  out.real = build_report(pd.normalized, pd.normalized.rows, ec);
  Rng noise_rng(derive_seed(seed, 0x401));
  const Tensor noise =
      uniform_matrix(noise_rng, kCopycolRows, pd.normalized.rows.cols(), 0.0, 1.0);
  out.noise = build_report(pd.normalized, noise, ec);

  if (with_probe) {
    const auto p0 = Clock::now();
    out.trained_probe =
        probe_game(m.agents, pd.training, m.state.reid_active, cfg.w_reid, cfg.probe);
    out.probe_seconds = seconds_since(p0);
    const std::vector<bool> inactive(pd.training.n_heads(), false);
    out.untrained_probe = probe_game(untrained, pd.training, inactive, cfg.w_reid, cfg.probe);
    out.probed = true;
  }
  return out;
}

struct Context {
  fs::path artifacts;
  std::map<std::uint64_t, CopycolRun> runs;

  const CopycolRun& copycol(std::uint64_t seed) {
    auto it = runs.find(seed);
    if (it == runs.end()) {
      std::fprintf(stderr, "training copycol seed %llu (2000 epochs)\n",
                   static_cast<unsigned long long>(seed));
      it = runs.emplace(seed, run_copycol(seed, seed == kMainSeed)).first;
      save("copycol_seed" + std::to_string(seed) + ".json", it->second.bytes());
    }
    return it->second;
  }

  void save(const std::string& name, const std::string& text) const {
    if (artifacts.empty()) return;
    fs::create_directories(artifacts);
    std::ofstream(artifacts / name) << text << '\n';
  }
};

// ---------------------------------------------------------------------------
// 6. Desk-scale end to end.

Outcome end_to_end(Context& ctx) {
  const CopycolRun& r = ctx.copycol(kMainSeed);
  const bool a = r.synth.inverse_em >= 0.6 && r.synth.inverse_em > r.noise.inverse_em;
  const bool b = r.synth.reid_mae >= 2.0 * r.real.reid_mae;
  const bool c = r.synth.inverse_model_mae >= 0.8 * r.real.inverse_model_mae;
  const bool fast = r.pipeline_seconds < 1200.0;
  return {a && b && c && fast,
          std::string("(a) inverse_em ") + fmt("%.4f", r.synth.inverse_em) + " vs noise " +
              fmt("%.4f", r.noise.inverse_em) + (a ? " ok" : " FAIL") + "; (b) reid_mae " +
              fmt("%.4f", r.synth.reid_mae) + " vs 2x real " +
              fmt("%.4f", 2.0 * r.real.reid_mae) + (b ? " ok" : " FAIL") +
              "; (c) inverse_model_mae " + fmt("%.4f", r.synth.inverse_model_mae) +
              " vs 0.8x real " + fmt("%.4f", 0.8 * r.real.inverse_model_mae) +
              (c ? " ok" : " FAIL") + "; k=" + std::to_string(r.k) + ", " +
              fmt("%.0f", r.pipeline_seconds) + "s (limit 1200s)"};
}

// ---------------------------------------------------------------------------
// 7. Equilibrium probe.

std::string pass_list(const ProbeReport& p) {
  std::string s;
  for (const auto& a : p.agents) {
    if (!s.empty()) s += ' ';
    s += a.name + "=" + fmt("%.3f", a.pass_fraction());
  }
  return s;
}

Outcome equilibrium(Context& ctx) {
  const CopycolRun& r = ctx.copycol(kMainSeed);
  const double trained_min = r.trained_probe.min_pass_fraction();
  const double untrained_min = r.untrained_probe.min_pass_fraction();
  const bool fast = r.probe_seconds < 300.0;
  return {trained_min >= 0.9 && untrained_min <= 0.7 && fast,
          "trained [" + pass_list(r.trained_probe) + "] min " + fmt("%.3f", trained_min) +
              " (need >= 0.9); untrained [" + pass_list(r.untrained_probe) + "] min " +
              fmt("%.3f", untrained_min) + " (need <= 0.7); probe " +
              fmt("%.1f", r.probe_seconds) + "s"};
}

// ---------------------------------------------------------------------------
// 8. Elbow fixture.

std::string blobs_bytes(std::vector<std::size_t>* ks) {
  nlohmann::json all = nlohmann::json::array();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ToyTable t = make_blobs3(300, seed);
    std::stringstream csv;
    write_csv(csv, t.names, t.rows);
    const Dataset raw = parse_csv(csv, t.sensitive, "blobs3");
    TrainConfig cfg;
    cfg.seed = seed;
    cfg.elbow_threshold = 0.10;
    const PreparedData pd = prepare_data(raw, cfg);
    if (ks) ks->push_back(pd.clustering.k);
    all.push_back(clustering_summary(pd.clustering));
  }
  return all.dump(2);
}

Outcome elbow(Context& ctx) {
  std::vector<std::size_t> ks;
  ctx.save("blobs3_clusterings.json", blobs_bytes(&ks));
  std::size_t hits = 0;
  std::string list;
  for (std::size_t k : ks) {
    hits += k == 3 ? 1 : 0;
    list += (list.empty() ? "" : ",") + std::to_string(k);
  }
  return {hits == 20, std::to_string(hits) + "/20 seeds select k=3 (k per seed: " + list + ")"};
}

// ---------------------------------------------------------------------------
// 9. Correlation-discrepancy rank correlation.

constexpr std::uint64_t kPropertySeeds[] = {7, 8, 9, 10, 11};

Outcome correlation_property(Context& ctx) {
  std::size_t positive = 0;
  std::string list;
  for (std::uint64_t seed : kPropertySeeds) {
    const double rho = ctx.copycol(seed).synth.corr_discrepancy_rank_corr;
    positive += rho > 0.0 ? 1 : 0;
    list += (list.empty() ? "" : " ") + std::string("seed ") + std::to_string(seed) + "=" +
            fmt("%+.3f", rho);
  }
  return {positive >= 4, std::to_string(positive) + "/5 seeds positive (need >= 4): " + list};
}

// ---------------------------------------------------------------------------
// 10. Determinism of 6-9.

Outcome determinism(Context& ctx) {
  std::size_t same = 0, total = 0;
  std::string diffs;
  for (std::uint64_t seed : kPropertySeeds) {
    const std::string first = ctx.copycol(seed).bytes();
    std::fprintf(stderr, "re-running copycol seed %llu\n", static_cast<unsigned long long>(seed));
    const std::string second = run_copycol(seed, seed == kMainSeed).bytes();
    ++total;
    if (first == second) {
      ++same;
    } else {
      diffs += " copycol" + std::to_string(seed);
    }
  }
  ++total;
  if (blobs_bytes(nullptr) == blobs_bytes(nullptr)) {
    ++same;
  } else {
    diffs += " blobs3";
  }
  return {same == total, std::to_string(same) + "/" + std::to_string(total) +
                             " serialized report sets byte-identical on rerun" +
                             (diffs.empty() ? "" : "; differing:" + diffs)};
}

}  // namespace
}  // namespace mhgan::acceptance

int main(int argc, char** argv) {
  using namespace mhgan::acceptance;
  CLI::App app{"Acceptance criteria runner"};
  std::vector<int> selected;
  std::string artifacts = "acceptance_artifacts";
  app.add_option("criteria", selected, "Criterion numbers to run (default: all)")
      ->check(CLI::Range(1, 10));
  app.add_option("--artifacts", artifacts,
                 "Directory for serialized reports (empty string disables)");
  CLI11_PARSE(app, argc, argv);

  Context ctx;
  ctx.artifacts = artifacts;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gradient oracle", gradient_oracle},
      {"EMD oracle", emd_oracle},
      {"combined-cost identities", combined_identities},
      {"gate behavior", gate_behavior},
      {"WGAN reduction", wgan_reduction},
      {"desk-scale end to end", [&] { return end_to_end(ctx); }},
      {"equilibrium probe", [&] { return equilibrium(ctx); }},
      {"elbow fixture", [&] { return elbow(ctx); }},
      {"correlation-discrepancy property", [&] { return correlation_property(ctx); }},
      {"determinism", [&] { return determinism(ctx); }},
  };
  const std::set<int> wanted(selected.begin(), selected.end());
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!wanted.empty() && !wanted.count(number)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("criterion %d [%s]: %s - %s (%.1fs)\n", number, criteria[i].first,
                o.pass ? "PASS" : "FAIL", o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
