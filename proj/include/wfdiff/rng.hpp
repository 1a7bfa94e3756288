// Copyright 2026 The wfdiff Authors.
//
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

#ifndef WFDIFF_RNG_HPP
#define WFDIFF_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace wfdiff {

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

// Key of substream `index` under `base`; distinct indices give unrelated
// keys, and the map does not depend on how replicas are scheduled.
std::uint64_t derive_stream(std::uint64_t base, std::uint64_t index);

// Stable 64-bit id for a named substream (FNV-1a).
std::uint64_t stream_id(std::string_view name);

// Independent generator for (seed, stream, lane). Lanes separate the noise
// of paths that share a stream, e.g. the two members of a pair.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t lane = 0);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t bits() { return engine_(); }
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
  boost::random::uniform_01<double> uniform_;
};

}  // namespace wfdiff

#endif  // WFDIFF_RNG_HPP
