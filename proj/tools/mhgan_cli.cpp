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

// Command-line front end: train, generate, evaluate, probe, make-toy.
//
// Exit codes: 0 success, 1 unexpected failure, 2 configuration or usage
// error, 3 data error, 4 numeric divergence.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mhgan/datapipe/dataset.hpp"
#include "mhgan/datapipe/toydata.hpp"
#include "mhgan/errors.hpp"
#include "mhgan/evaluator/report.hpp"
#include "mhgan/hash.hpp"
#include "mhgan/trainer/probe.hpp"
#include "mhgan/trainer/run.hpp"

namespace fs = std::filesystem;
using mhgan::ConfigError;
using mhgan::DataError;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDivergence = 4;

int guarded(const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const mhgan::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mhgan::ArgumentError& e) {
    std::cerr << "argument error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mhgan::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const mhgan::DimensionError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const mhgan::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUnexpected;
  }
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
}

void ensure_parent(const std::string& file) {
  const fs::path parent = fs::path(file).parent_path();
  if (!parent.empty()) ensure_directory(parent);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  open_out(path) << j.dump(2) << '\n';
}

std::string metadata_line(const std::string& hash, std::uint64_t seed) {
  return "# config_hash=" + hash + " seed=" + std::to_string(seed) + "\n";
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string config_path;
  std::map<std::string, std::string> overrides;
  std::vector<std::string> sets;
  bool quiet = false;
};

mhgan::RunConfig resolve_config(const TrainArgs& args) {
  mhgan::RunConfig rc;
  if (!args.config_path.empty()) rc = mhgan::load_config(args.config_path);
  for (const auto& [key, value] : args.overrides) {
    if (!value.empty()) mhgan::set_config_value(rc, key, value);
  }
  for (const std::string& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    mhgan::set_config_value(rc, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (rc.data.empty()) throw ConfigError("no dataset given (--data or data= in config)");
  if (rc.sensitive.empty()) throw ConfigError("no sensitive column given (--sensitive)");
  if (rc.out.empty()) throw ConfigError("no output directory given (--out)");
  mhgan::validate(rc.train);
  return rc;
}

void cmd_train(const TrainArgs& args) {
  const mhgan::RunConfig rc = resolve_config(args);
  const std::string hash = mhgan::config_hash(rc);
  const std::uint64_t seed = rc.train.seed;
  const mhgan::Dataset raw = mhgan::load_csv(rc.data, rc.sensitive);
  const mhgan::PreparedData prep = mhgan::prepare_data(raw, rc.train);
  for (const auto& w : prep.warnings) std::cerr << "warning: " << w << '\n';

  const fs::path out(rc.out);
  ensure_directory(out);
  open_out(out / "config.txt") << metadata_line(hash, seed) << mhgan::config_text(rc);
  nlohmann::json clusters = mhgan::clustering_summary(prep.clustering);
  clusters["config_hash"] = hash;
  clusters["seed"] = seed;
  write_json(out / "clustering.json", clusters);

  std::ofstream log = open_out(out / "training_log.csv");
  log << metadata_line(hash, seed);
  mhgan::write_log_header(log, prep.training.n_heads());
  const std::size_t every = std::max<std::size_t>(1, rc.train.epochs / 10);
  const mhgan::TrainedModel model =
      mhgan::train_model(prep.training, rc.train, [&](const mhgan::EpochRecord& r) {
        mhgan::write_log_row(log, r);
        if (!args.quiet && (r.epoch % every == 0 || r.epoch == rc.train.epochs)) {
          std::cerr << "epoch " << r.epoch << "/" << rc.train.epochs
                    << " generator_loss " << r.generator_loss << '\n';
        }
      });
  log.close();

  mhgan::save_checkpoint((out / "checkpoint").string(),
                         mhgan::make_checkpoint(rc, prep, model.agents, model.state));
  std::cout << "trained " << prep.training.n_heads() << " heads for "
            << model.state.epoch << " epochs; config_hash " << hash << '\n'
            << "artifacts in " << out.string() << '\n';
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::string checkpoint;
  std::size_t rows = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string output;
};

void cmd_generate(const GenerateArgs& args) {
  const mhgan::Checkpoint c = mhgan::load_checkpoint(args.checkpoint);
  const std::uint64_t seed = args.seed_given ? args.seed : c.run.train.seed;
  std::vector<std::size_t> head_of_row;
  const mhgan::Tensor unit = mhgan::generate_rows(
      c.agents.generator, c.clustering.cluster_sizes(), args.rows, seed, &head_of_row);
  const mhgan::Tensor raw = mhgan::denormalize(unit, c.feature_bounds);
  ensure_parent(args.output);
  mhgan::save_csv(args.output, c.feature_names, raw);

  std::vector<std::size_t> usage(c.agents.generator.n_heads(), 0);
  for (std::size_t h : head_of_row) ++usage[h];
  write_json(args.output + ".meta.json", {{"config_hash", c.config_hash},
                                          {"seed", seed},
                                          {"rows", args.rows},
                                          {"checkpoint_epoch", c.epoch},
                                          {"head_usage", usage}});
  std::cout << "wrote " << args.rows << " rows to " << args.output << '\n';
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string real;
  std::string synth;
  std::string sensitive;
  std::string out;
  std::uint64_t seed = 0;
  bool sliced = false;
};

void cmd_evaluate(const EvaluateArgs& args) {
  const mhgan::Dataset real_raw = mhgan::load_csv(args.real, args.sensitive);
  mhgan::Dataset synth_raw = mhgan::load_csv(args.synth, args.sensitive);
  if (synth_raw.feature_names != real_raw.feature_names) {
    throw DataError("schema mismatch: " + args.synth + " does not share the header of " +
                    args.real);
  }
  // Synthetic rows are scaled with the real data's bounds.
  synth_raw.feature_bounds = real_raw.feature_bounds;
  const mhgan::Dataset real = mhgan::normalize(real_raw);
  const mhgan::Dataset synth = mhgan::normalize(synth_raw);

  mhgan::EvalConfig cfg;
  cfg.seed = args.seed;
  cfg.sliced = args.sliced;
  const mhgan::EvaluationReport r = mhgan::build_report(real, synth.rows, cfg);

  const fs::path out(args.out);
  ensure_directory(out);
  write_json(out / "report.json", mhgan::to_json(r));
  std::ofstream radar = open_out(out / "radar.csv");
  radar << metadata_line(r.config_hash, r.seed);
  mhgan::write_radar_csv(radar, r);

  char line[160];
  std::snprintf(line, sizeof line, "inverse_em %.2f\ninverse_model_mae %.2f\nreid_mae %.2f\n",
                r.inverse_em, r.inverse_model_mae, r.reid_mae);
  std::cout << line;
}

// ---------------------------------------------------------------------------
// probe

struct ProbeArgs {
  std::string checkpoint;
  std::string output;
  std::optional<double> gamma, epsilon;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
};

void cmd_probe(const ProbeArgs& args) {
  mhgan::Checkpoint c = mhgan::load_checkpoint(args.checkpoint);
  mhgan::ProbeConfig cfg = c.run.train.probe;
  if (args.gamma) cfg.gamma = *args.gamma;
  if (args.epsilon) cfg.epsilon = *args.epsilon;
  if (args.trials) cfg.trials = *args.trials;
  if (args.seed) cfg.seed = *args.seed;
  const mhgan::TrainingData data = c.training_data();
  const mhgan::ProbeReport report =
      mhgan::probe_game(c.agents, data, c.reid_active, c.run.train.w_reid, cfg);
  nlohmann::json j = mhgan::to_json(report);
  j["config_hash"] = c.config_hash;
  j["checkpoint_epoch"] = c.epoch;
  ensure_parent(args.output);
  write_json(args.output, j);
  for (const auto& a : report.agents) {
    char line[128];
    std::snprintf(line, sizeof line, "%-14s pass_fraction %.4f\n", a.name.c_str(),
                  a.pass_fraction());
    std::cout << line;
  }
}

// ---------------------------------------------------------------------------
// make-toy

struct ToyArgs {
  std::string kind;
  std::optional<std::size_t> rows;
  std::uint64_t seed = 0;
  std::string output;
};

void cmd_make_toy(const ToyArgs& args) {
  const std::size_t n =
      args.rows ? *args.rows : (args.kind == "heartlike" ? mhgan::kHeartRows : 300);
  const mhgan::ToyTable t = mhgan::make_toy(args.kind, n, args.seed);
  ensure_parent(args.output);
  mhgan::save_csv(args.output, t.names, t.rows);
  const std::string canon =
      "kind=" + args.kind + ";rows=" + std::to_string(n) + ";seed=" + std::to_string(args.seed);
  write_json(args.output + ".meta.json",
             {{"config_hash", mhgan::hex64(mhgan::fnv1a64(canon))},
              {"seed", args.seed},
              {"kind", args.kind},
              {"rows", n},
              {"sensitive", t.sensitive}});
  std::cout << "wrote " << n << " " << args.kind << " rows to " << args.output
            << " (sensitive column '" << t.sensitive << "')\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-head adversarial generator for private synthetic tabular data"};
  app.require_subcommand(1);

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "Cluster, train and checkpoint a model");
  train_cmd->add_option("--config", train.config_path, "key=value run-config file");
  train_cmd->add_option("--set", train.sets, "Override any config key (key=value)");
  train_cmd->add_flag("--quiet", train.quiet, "Suppress progress lines");
  for (const auto& [key, value] : mhgan::to_key_values(mhgan::RunConfig{})) {
    train.overrides[key];
    train_cmd->add_option("--" + key, train.overrides[key],
                          "Config key " + key + (value.empty() ? "" : " (default " + value + ")"));
  }

  GenerateArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("generate", "Write synthetic rows from a checkpoint");
  gen_cmd->add_option("--checkpoint", gen.checkpoint, "Checkpoint directory")->required();
  gen_cmd->add_option("--rows", gen.rows, "Number of rows")->required();
  gen_cmd->add_option("--seed", gen.seed, "Sampling seed (default: training seed)");
  gen_cmd->add_option("--output", gen.output, "Output CSV path")->required();

  EvaluateArgs ev;
  CLI::App* ev_cmd = app.add_subcommand("evaluate", "Score synthetic data against real data");
  ev_cmd->add_option("--real", ev.real, "Real CSV")->required();
  ev_cmd->add_option("--synth", ev.synth, "Synthetic CSV")->required();
  ev_cmd->add_option("--sensitive", ev.sensitive, "Sensitive column name")->required();
  ev_cmd->add_option("--out", ev.out, "Output directory")->required();
  ev_cmd->add_option("--seed", ev.seed, "Evaluation seed");
  ev_cmd->add_flag("--sliced", ev.sliced, "Use sliced Wasserstein for raw_em");

  ProbeArgs pr;
  CLI::App* pr_cmd = app.add_subcommand("probe", "Equilibrium perturbation probe");
  pr_cmd->add_option("--checkpoint", pr.checkpoint, "Checkpoint directory")->required();
  pr_cmd->add_option("--output", pr.output, "Probe report JSON path")->required();
  pr_cmd->add_option("--gamma", pr.gamma, "Perturbation radius");
  pr_cmd->add_option("--epsilon", pr.epsilon, "Slack");
  pr_cmd->add_option("--trials", pr.trials, "Perturbations per agent");
  pr_cmd->add_option("--seed", pr.seed, "Probe seed");

  ToyArgs toy;
  CLI::App* toy_cmd = app.add_subcommand("make-toy", "Write a bundled synthetic dataset");
  toy_cmd->add_option("--kind", toy.kind, "blobs3, copycol or heartlike")->required();
  toy_cmd->add_option("--rows", toy.rows, "Row count");
  toy_cmd->add_option("--seed", toy.seed, "Seed");
  toy_cmd->add_option("--output", toy.output, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  gen.seed_given = gen_cmd->count("--seed") > 0;

  if (*train_cmd) return guarded([&] { cmd_train(train); });
  if (*gen_cmd) return guarded([&] { cmd_generate(gen); });
  if (*ev_cmd) return guarded([&] { cmd_evaluate(ev); });
  if (*pr_cmd) return guarded([&] { cmd_probe(pr); });
  if (*toy_cmd) return guarded([&] { cmd_make_toy(toy); });
  return kExitConfig;
}
