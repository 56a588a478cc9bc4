#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace morreylab {

// Module-level parallelism cap, set by the CLI from --threads or
// MORREYLAB_THREADS. Default 1; results are identical for any cap because
// work is statically partitioned and merged in index order.
int thread_cap() noexcept;
void set_thread_cap(int n) noexcept;

template <class Fn>
void parallel_for(std::int64_t n, Fn&& fn) {
  const std::int64_t t = std::min<std::int64_t>(thread_cap(), n);
  if (t <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(t));
  const std::int64_t chunk = (n + t - 1) / t;
  for (std::int64_t w = 0; w < t; ++w) {
    const std::int64_t lo = w * chunk;
    const std::int64_t hi = std::min(n, lo + chunk);
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace morreylab
