/* Copyright 2026 The QEK Lab Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef QEKL_PARALLEL_HPP_
#define QEKL_PARALLEL_HPP_

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace qekl {

// Runs fn(k) for k in [0, count) on up to `threads` workers. Work items
// must be independent pure computations writing to disjoint locations;
// combined with stream-keyed RNG this keeps results schedule-independent.
inline void parallel_for(int count, int threads,
                         const std::function<void(int)>& fn) {
  if (threads > count) threads = count;
  if (threads <= 1) {
    for (int k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int k = next.fetch_add(1); k < count; k = next.fetch_add(1)) fn(k);
    });
  }
  for (auto& worker : pool) worker.join();
}

}  // namespace qekl

#endif  // QEKL_PARALLEL_HPP_
