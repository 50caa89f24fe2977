#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace pvs {

/// Thread count for per-pixel loops: PVS_THREADS when set, otherwise the
/// hardware concurrency. Results are independent of the thread count because
/// every row is written by exactly one worker.
inline int worker_count() {
  if (const char* env = std::getenv("PVS_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

template <typename Fn>
void parallel_rows(int rows, Fn&& fn) {
  const int threads = std::min(worker_count(), rows > 0 ? rows : 1);
  if (threads <= 1 || rows <= 1) {
    for (int y = 0; y < rows; ++y) fn(y);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int k = 0; k < threads; ++k) {
    pool.emplace_back([k, threads, rows, &fn]() {
      for (int y = k; y < rows; y += threads) fn(y);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace pvs
