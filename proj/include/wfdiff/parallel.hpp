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

#ifndef WFDIFF_PARALLEL_HPP
#define WFDIFF_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace wfdiff {

// Calls fn(i) for i in [0, n) on `workers` threads. Each index is handled
// exactly once; callers write results into per-index slots and reduce in
// index order, so output never depends on the worker count. If any fn
// throws, the exception of the lowest failing index is rethrown after all
// threads join, again independent of scheduling.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  constexpr std::size_t kChunk = 64;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::size_t error_index = n;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t start = next.fetch_add(kChunk);
      if (start >= n) return;
      const std::size_t stop = std::min(n, start + kChunk);
      for (std::size_t i = start; i < stop; ++i) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (i < error_index) {
            error_index = i;
            error = std::current_exception();
          }
          break;
        }
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = static_cast<unsigned>(
      std::min<std::size_t>(workers, (n + kChunk - 1) / kChunk));
  pool.reserve(count);
  for (unsigned w = 0; w < count; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace wfdiff

#endif  // WFDIFF_PARALLEL_HPP
