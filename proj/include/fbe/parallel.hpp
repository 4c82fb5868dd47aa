// Copyright 2026 The fbe Authors
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

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace fbe {

// Worker count for data-parallel kernels. Kernels split work into fixed
// chunks and combine results in chunk order, so output never depends on it.
inline std::atomic<unsigned>& thread_hint() {
  static std::atomic<unsigned> n{std::max(1u, std::thread::hardware_concurrency())};
  return n;
}

// Calls body(begin, end) over [0, n) in contiguous chunks.
template <class Body>
void parallel_for(std::size_t n, Body&& body, std::size_t min_chunk = 4096) {
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(thread_hint().load(), (n + min_chunk - 1) / std::max<std::size_t>(min_chunk, 1)));
  if (workers <= 1) {
    if (n) body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t step = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = std::min(n, w * step), hi = std::min(n, lo + step);
    pool.emplace_back([&, w, lo, hi] {
      try {
        if (lo < hi) body(lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace fbe
