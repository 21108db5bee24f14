// Copyright 2026 The samarl Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Flat binary network file, little-endian:
//
//   char[8]  magic "SAMARLQN"
//   uint32   version (1)
//   uint32   number of layer widths L+1
//   uint64   widths[L+1]           (input, hidden..., output)
//   float64  per layer: weights row-major (out x in), then bias (out)

#ifndef SAMARL_NEURAL_CHECKPOINT_HPP
#define SAMARL_NEURAL_CHECKPOINT_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "samarl/errors.hpp"
#include "samarl/neural/mlp.hpp"

namespace samarl::neural {

inline constexpr std::array<char, 8> kCheckpointMagic = {'S', 'A', 'M', 'A', 'R', 'L', 'Q', 'N'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is, const std::string& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw IoError(path + ": truncated checkpoint");
  return v;
}

}  // namespace detail

inline void save_checkpoint(const std::filesystem::path& path, const Mlp& mlp) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError(path.string() + ": cannot open for writing");
  os.write(kCheckpointMagic.data(), kCheckpointMagic.size());
  detail::put<std::uint32_t>(os, kCheckpointVersion);
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(mlp.sizes().size()));
  for (int s : mlp.sizes()) detail::put<std::uint64_t>(os, static_cast<std::uint64_t>(s));
  for (int l = 0; l < mlp.num_layers(); ++l) {
    const Matrix& w = mlp.weight(l);  // already row-major
    os.write(reinterpret_cast<const char*>(w.data()), static_cast<std::streamsize>(w.size() * sizeof(double)));
    const Vector& b = mlp.bias(l);
    os.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size() * sizeof(double)));
  }
  if (!os) throw IoError(path.string() + ": write failed");
}

// Reads a network; when `expected` is non-empty the stored widths must match.
inline Mlp load_checkpoint(const std::filesystem::path& path, const std::vector<int>& expected = {}) {
  const std::string p = path.string();
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(p + ": cannot open checkpoint");
  std::array<char, 8> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kCheckpointMagic)
    throw IoError(p + ": not a network checkpoint");
  if (detail::get<std::uint32_t>(is, p) != kCheckpointVersion)
    throw IoError(p + ": unsupported checkpoint version");
  const auto count = detail::get<std::uint32_t>(is, p);
  if (count < 2 || count > 64) throw IoError(p + ": bad layer count");
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto s = detail::get<std::uint64_t>(is, p);
    if (s == 0 || s > (1u << 24)) throw IoError(p + ": bad layer width");
    sizes.push_back(static_cast<int>(s));
  }
  if (!expected.empty() && sizes != expected) {
    std::string got, want;
    for (int s : sizes) got += std::to_string(s) + " ";
    for (int s : expected) want += std::to_string(s) + " ";
    throw ShapeError(p + ": checkpoint widths [" + got + "] do not match scenario [" + want + "]");
  }
  Mlp mlp(sizes);
  for (int l = 0; l < mlp.num_layers(); ++l) {
    Matrix& w = mlp.weight(l);
    Vector& b = mlp.bias(l);
    if (!is.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(w.size() * sizeof(double))) ||
        !is.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(b.size() * sizeof(double))))
      throw IoError(p + ": truncated checkpoint");
  }
  return mlp;
}

}  // namespace samarl::neural

#endif  // SAMARL_NEURAL_CHECKPOINT_HPP
