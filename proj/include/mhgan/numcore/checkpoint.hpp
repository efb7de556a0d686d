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

#ifndef MHGAN_NUMCORE_CHECKPOINT_HPP_
#define MHGAN_NUMCORE_CHECKPOINT_HPP_

// Portable text container for a Network:
//
//   mhgan-network <version>
//   layers <count>
//   layer <kind> <input_width> <output_width> <activation> <kernel> <channels>
//   weight <n> <hexfloat>...
//   bias <n> <hexfloat>...
//   ...
//
// Values are written as C99 hexadecimal floats so a save/load cycle is
// bitwise exact.

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "mhgan/errors.hpp"
#include "mhgan/numcore/network.hpp"

namespace mhgan {

inline constexpr int kNetworkFormatVersion = 1;

inline std::string format_hex(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::hex);
  if (ec != std::errc()) throw DataError("cannot format value");
  return std::string(buf, end);
}

inline double parse_hex(const std::string& token) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  bool negative = false;
  if (first != last && *first == '-') {
    negative = true;
    ++first;
  }
  auto [ptr, ec] = std::from_chars(first, last, v, std::chars_format::hex);
  if (ec != std::errc() || ptr != last) {
    throw DataError("malformed numeric token '" + token + "' in checkpoint");
  }
  return negative ? -v : v;
}

inline void write_network(std::ostream& out, const Network& net) {
  out << "mhgan-network " << kNetworkFormatVersion << '\n';
  out << "layers " << net.layers().size() << '\n';
  auto write_values = [&out](const char* tag, const Tensor& t) {
    out << tag << ' ' << t.size();
    for (double v : t.storage()) out << ' ' << format_hex(v);
    out << '\n';
  };
  for (const Layer& l : net.layers()) {
    const LayerSpec& s = l.spec;
    out << "layer " << to_string(s.kind) << ' ' << s.input_width << ' '
        << s.output_width << ' ' << to_string(s.activation) << ' '
        << s.kernel_size << ' ' << s.channels << '\n';
    write_values("weight", l.weight);
    write_values("bias", l.bias);
  }
}

inline Network read_network(std::istream& in) {
  auto expect = [&in](const std::string& want) {
    std::string tok;
    if (!(in >> tok) || tok != want) {
      throw DataError("checkpoint: expected '" + want + "', found '" + tok +
                      "'");
    }
  };
  expect("mhgan-network");
  int version = 0;
  if (!(in >> version) || version != kNetworkFormatVersion) {
    throw DataError("checkpoint: unsupported format version " +
                    std::to_string(version));
  }
  expect("layers");
  std::size_t count = 0;
  if (!(in >> count)) throw DataError("checkpoint: missing layer count");

  auto read_values = [&](const char* tag, Tensor& t) {
    expect(tag);
    std::size_t n = 0;
    if (!(in >> n) || n != t.size()) {
      throw DataError(std::string("checkpoint: ") + tag +
                      " length does not match layer shape");
    }
    std::string tok;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(in >> tok)) throw DataError("checkpoint: truncated values");
      t[i] = parse_hex(tok);
    }
  };

  std::vector<Layer> layers;
  for (std::size_t i = 0; i < count; ++i) {
    expect("layer");
    std::string kind, act;
    LayerSpec s;
    if (!(in >> kind >> s.input_width >> s.output_width >> act >>
          s.kernel_size >> s.channels)) {
      throw DataError("checkpoint: malformed layer header");
    }
    if (kind == "dense") {
      s.kind = LayerKind::kDense;
    } else if (kind == "conv1d") {
      s.kind = LayerKind::kConv1d;
    } else {
      throw DataError("checkpoint: unknown layer kind '" + kind + "'");
    }
    auto a = parse_activation(act);
    if (!a) throw DataError("checkpoint: unknown activation '" + act + "'");
    s.activation = *a;
    try {
      s.validate();
    } catch (const ArgumentError& e) {
      throw DataError(std::string("checkpoint: ") + e.what());
    }
    Layer layer{s, Tensor(s.weight_shape()), Tensor(s.bias_shape())};
    read_values("weight", layer.weight);
    read_values("bias", layer.bias);
    layers.push_back(std::move(layer));
  }
  try {
    return Network(std::move(layers));
  } catch (const DimensionError& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
}

inline void save_network(const std::string& path, const Network& net) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint " + path);
  write_network(out, net);
  if (!out) throw DataError("failed writing checkpoint " + path);
}

inline Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path);
  return read_network(in);
}

}  // namespace mhgan

#endif  // MHGAN_NUMCORE_CHECKPOINT_HPP_
