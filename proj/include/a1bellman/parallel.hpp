#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace a1bellman {

/// Worker count: BELLMAN_THREADS if set to a positive integer, otherwise the
/// hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("BELLMAN_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits [0, n) into contiguous blocks, runs body(begin, end) for each on
/// its own thread, and returns the per-block results in block order.
template <class Result, class Body>
std::vector<Result> parallel_blocks(std::size_t n, Body body) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(worker_count(), n == 0 ? 1 : n));
  std::vector<Result> results(workers);
  if (workers == 1) {
    results[0] = body(std::size_t{0}, n);
    return results;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    const std::size_t begin = n * t / workers;
    const std::size_t end = n * (t + 1) / workers;
    threads.emplace_back([&results, &body, t, begin, end] { results[t] = body(begin, end); });
  }
  for (auto& th : threads) th.join();
  return results;
}

}  // namespace a1bellman
