#include "morreylab/parallel.hpp"

#include <atomic>

namespace morreylab {

namespace {
std::atomic<int> g_thread_cap{1};
}

int thread_cap() noexcept { return g_thread_cap.load(std::memory_order_relaxed); }

void set_thread_cap(int n) noexcept {
  g_thread_cap.store(n < 1 ? 1 : n, std::memory_order_relaxed);
}

}  // namespace morreylab
