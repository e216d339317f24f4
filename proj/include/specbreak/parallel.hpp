#pragma once

#include "specbreak/types.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace specbreak {

/// Worker count from SPECBREAK_THREADS, else the hardware concurrency (at least 1).
[[nodiscard]] int default_workers();

/// `requested` if positive, otherwise default_workers().
[[nodiscard]] int resolve_workers(int requested);

/**
 * Calls body(i) for i in [0, n) on up to `workers` threads.
 *
 * Each index is processed exactly once; callers write results into slot i so
 * the output never depends on scheduling. If bodies throw, the exception of
 * the smallest failing index is rethrown.
 */
template <typename Body>
void parallel_for(Index n, Body&& body, int workers = 0) {
  const int threads = static_cast<int>(std::min<Index>(resolve_workers(workers), n));
  if (threads <= 1) {
    for (Index i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<Index> next{0};
  std::mutex failure_mutex;
  Index failed_index = n;
  std::exception_ptr failure;
  auto run = [&] {
    for (Index i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads - 1);
  for (int t = 1; t < threads; ++t) pool.emplace_back(run);
  run();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace specbreak
