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

#include "wfdiff/rng.hpp"

namespace wfdiff {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream(std::uint64_t base, std::uint64_t index) {
  return mix64(base ^ mix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t stream_id(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t lane) {
  const std::uint64_t key = derive_stream(derive_stream(seed, stream), lane);
  std::seed_seq seq{static_cast<std::uint32_t>(key),
                    static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(mix64(key)),
                    static_cast<std::uint32_t>(mix64(key) >> 32)};
  engine_.seed(seq);
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Lemire-free rejection; n is small in every caller.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % n;
}

}  // namespace wfdiff
