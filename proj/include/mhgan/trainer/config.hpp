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

#ifndef MHGAN_TRAINER_CONFIG_HPP_
#define MHGAN_TRAINER_CONFIG_HPP_

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mhgan/errors.hpp"
#include "mhgan/hash.hpp"
#include "mhgan/networks/agents.hpp"
#include "mhgan/numcore/optimizer.hpp"

namespace mhgan {

enum class GateScope { kPerHead, kGlobal };
enum class LossMode { kOwn, kCombined };

struct ProbeConfig {
  double gamma = 0.01;
  double epsilon = 1e-3;
  std::size_t trials = 64;
  std::uint64_t seed = 0;
  std::size_t noise_rows = 256;  // fixed noise sample per head
  std::size_t real_rows = 512;   // cap on real rows per head
};

struct TrainConfig {
  double learning_rate = 0.0002;
  double clip = 0.05;
  std::size_t n_critic = 5;
  std::size_t batch_size = 64;
  std::size_t epochs = 2000;
  double w_reid = 1.0;
  double em_gate = 0.3;
  bool reid_enabled = true;
  bool reid_shared = false;
  GateScope gate_scope = GateScope::kPerHead;
  LossMode loss_mode = LossMode::kCombined;
  OptimizerKind critic_optimizer = OptimizerKind::kRmsprop;
  OptimizerKind generator_optimizer = OptimizerKind::kRmsprop;
  OptimizerKind reid_optimizer = OptimizerKind::kAdam;
  std::size_t k = 0;  // 0 selects k with the elbow rule
  std::size_t k_max = 8;
  double elbow_threshold = 0.10;
  std::uint64_t seed = 0;
  Architecture arch;
  ProbeConfig probe;
};

// Everything a CLI run needs; serializes to the flat key=value format.
struct RunConfig {
  std::string data;
  std::string sensitive;
  std::string out;
  TrainConfig train;
};

namespace detail {

inline std::string join_widths(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T>
T parse_integer(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" +
                      value + "'");
  }
  return out;
}

inline double parse_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "': expected a number, got '" +
                      value + "'");
  }
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" +
                    value + "'");
}

inline std::vector<std::size_t> parse_widths(const std::string& key,
                                             const std::string& value) {
  std::vector<std::size_t> out;
  if (value.empty() || value == "none") return out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_integer<std::size_t>(key, item));
  }
  return out;
}

inline OptimizerKind parse_optimizer(const std::string& key,
                                     const std::string& value) {
  if (value == "rmsprop") return OptimizerKind::kRmsprop;
  if (value == "adam") return OptimizerKind::kAdam;
  throw ConfigError("config key '" + key + "': expected rmsprop or adam");
}

inline std::string optimizer_name(OptimizerKind k) {
  return k == OptimizerKind::kRmsprop ? "rmsprop" : "adam";
}

}  // namespace detail

// Canonical key=value map of a run configuration (sorted by key).
inline std::map<std::string, std::string> to_key_values(const RunConfig& rc) {
  using detail::format_double;
  const TrainConfig& c = rc.train;
  std::map<std::string, std::string> kv;
  kv["data"] = rc.data;
  kv["sensitive"] = rc.sensitive;
  kv["out"] = rc.out;
  kv["learning_rate"] = format_double(c.learning_rate);
  kv["clip"] = format_double(c.clip);
  kv["n_critic"] = std::to_string(c.n_critic);
  kv["batch_size"] = std::to_string(c.batch_size);
  kv["epochs"] = std::to_string(c.epochs);
  kv["w_reid"] = format_double(c.w_reid);
  kv["em_gate"] = format_double(c.em_gate);
  kv["reid"] = c.reid_enabled ? "true" : "false";
  kv["reid_shared"] = c.reid_shared ? "true" : "false";
  kv["gate_scope"] = c.gate_scope == GateScope::kPerHead ? "per_head" : "global";
  kv["loss_mode"] = c.loss_mode == LossMode::kCombined ? "combined" : "own";
  kv["critic_optimizer"] = detail::optimizer_name(c.critic_optimizer);
  kv["generator_optimizer"] = detail::optimizer_name(c.generator_optimizer);
  kv["reid_optimizer"] = detail::optimizer_name(c.reid_optimizer);
  kv["k"] = std::to_string(c.k);
  kv["k_max"] = std::to_string(c.k_max);
  kv["elbow_threshold"] = format_double(c.elbow_threshold);
  kv["seed"] = std::to_string(c.seed);
  kv["noise_dim"] = std::to_string(c.arch.noise_dim);
  kv["trunk_widths"] = detail::join_widths(c.arch.trunk_widths);
  kv["head_widths"] = detail::join_widths(c.arch.head_widths);
  kv["conv_kernel"] = std::to_string(c.arch.conv_kernel);
  kv["conv_channels"] = std::to_string(c.arch.conv_channels);
  kv["critic_widths"] = detail::join_widths(c.arch.critic_widths);
  kv["hidden_activation"] = std::string(to_string(c.arch.hidden_activation));
  kv["probe.gamma"] = format_double(c.probe.gamma);
  kv["probe.epsilon"] = format_double(c.probe.epsilon);
  kv["probe.trials"] = std::to_string(c.probe.trials);
  kv["probe.seed"] = std::to_string(c.probe.seed);
  kv["probe.noise_rows"] = std::to_string(c.probe.noise_rows);
  kv["probe.real_rows"] = std::to_string(c.probe.real_rows);
  return kv;
}

inline void set_config_value(RunConfig& rc, const std::string& key,
                             const std::string& value) {
  using namespace detail;
  TrainConfig& c = rc.train;
  static const std::map<std::string,
                        std::function<void(RunConfig&, TrainConfig&,
                                           const std::string&, const std::string&)>>
      setters = {
          {"data", [](RunConfig& r, TrainConfig&, auto&, auto& v) { r.data = v; }},
          {"sensitive",
           [](RunConfig& r, TrainConfig&, auto&, auto& v) { r.sensitive = v; }},
          {"out", [](RunConfig& r, TrainConfig&, auto&, auto& v) { r.out = v; }},
          {"learning_rate", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.learning_rate = parse_real(k, v);
           }},
          {"clip", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.clip = parse_real(k, v);
           }},
          {"n_critic", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.n_critic = parse_integer<std::size_t>(k, v);
           }},
          {"batch_size", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.batch_size = parse_integer<std::size_t>(k, v);
           }},
          {"epochs", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.epochs = parse_integer<std::size_t>(k, v);
           }},
          {"w_reid", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.w_reid = parse_real(k, v);
           }},
          {"em_gate", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.em_gate = parse_real(k, v);
           }},
          {"reid", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.reid_enabled = parse_bool(k, v);
           }},
          {"reid_shared", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.reid_shared = parse_bool(k, v);
           }},
          {"gate_scope", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             if (v == "per_head") {
               t.gate_scope = GateScope::kPerHead;
             } else if (v == "global") {
               t.gate_scope = GateScope::kGlobal;
             } else {
               throw ConfigError("config key '" + k + "': expected per_head or global");
             }
           }},
          {"loss_mode", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             if (v == "combined") {
               t.loss_mode = LossMode::kCombined;
             } else if (v == "own") {
               t.loss_mode = LossMode::kOwn;
             } else {
               throw ConfigError("config key '" + k + "': expected combined or own");
             }
           }},
          {"critic_optimizer", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.critic_optimizer = parse_optimizer(k, v);
           }},
          {"generator_optimizer", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.generator_optimizer = parse_optimizer(k, v);
           }},
          {"reid_optimizer", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.reid_optimizer = parse_optimizer(k, v);
           }},
          {"k", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.k = parse_integer<std::size_t>(k, v);
           }},
          {"k_max", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.k_max = parse_integer<std::size_t>(k, v);
           }},
          {"elbow_threshold", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.elbow_threshold = parse_real(k, v);
           }},
          {"seed", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.seed = parse_integer<std::uint64_t>(k, v);
           }},
          {"noise_dim", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.arch.noise_dim = parse_integer<std::size_t>(k, v);
           }},
          {"trunk_widths", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.arch.trunk_widths = parse_widths(k, v);
           }},
          {"head_widths", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.arch.head_widths = parse_widths(k, v);
           }},
          {"conv_kernel", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.arch.conv_kernel = parse_integer<std::size_t>(k, v);
           }},
          {"conv_channels", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.arch.conv_channels = parse_integer<std::size_t>(k, v);
           }},
          {"critic_widths", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.arch.critic_widths = parse_widths(k, v);
           }},
          {"hidden_activation", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             auto a = parse_activation(v);
             if (!a) throw ConfigError("config key '" + k + "': unknown activation");
             t.arch.hidden_activation = *a;
           }},
          {"probe.gamma", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.probe.gamma = parse_real(k, v);
           }},
          {"probe.epsilon", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.probe.epsilon = parse_real(k, v);
           }},
          {"probe.trials", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.probe.trials = parse_integer<std::size_t>(k, v);
           }},
          {"probe.seed", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.probe.seed = parse_integer<std::uint64_t>(k, v);
           }},
          {"probe.noise_rows", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.probe.noise_rows = parse_integer<std::size_t>(k, v);
           }},
          {"probe.real_rows", [](RunConfig&, TrainConfig& t, auto& k, auto& v) {
             t.probe.real_rows = parse_integer<std::size_t>(k, v);
           }},
      };
  auto it = setters.find(key);
  if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(rc, c, key, value);
}

// Checks value ranges that the parsers cannot.
inline void validate(const TrainConfig& c) {
  if (!(c.learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(c.clip > 0.0)) throw ConfigError("clip must be > 0");
  if (c.n_critic == 0) throw ConfigError("n_critic must be >= 1");
  if (c.batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (c.w_reid < 0.0) throw ConfigError("w_reid must be >= 0");
  if (c.k_max < 2) throw ConfigError("k_max must be >= 2");
  if (c.arch.noise_dim == 0) throw ConfigError("noise_dim must be >= 1");
  if (!(c.probe.gamma > 0.0)) throw ConfigError("probe.gamma must be > 0");
  if (c.probe.epsilon < 0.0) throw ConfigError("probe.epsilon must be >= 0");
  if (c.probe.trials == 0) throw ConfigError("probe.trials must be >= 1");
}

// Parses `key = value` lines; '#' starts a comment.
inline void apply_config_text(RunConfig& rc, std::istream& in,
                              const std::string& source = "<config>") {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) +
                        ": expected key=value");
    }
    set_config_value(rc, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  RunConfig rc;
  apply_config_text(rc, in, path);
  return rc;
}

inline std::string config_text(const RunConfig& rc) {
  std::string s;
  for (const auto& [k, v] : to_key_values(rc)) s += k + "=" + v + "\n";
  return s;
}

// Hash of the settings that influence numeric results (paths excluded).
inline std::string config_hash(const RunConfig& rc) {
  std::string s;
  for (const auto& [k, v] : to_key_values(rc)) {
    if (k == "data" || k == "out") continue;
    s += k + "=" + v + "\n";
  }
  return hex64(fnv1a64(s));
}

}  // namespace mhgan

#endif  // MHGAN_TRAINER_CONFIG_HPP_
