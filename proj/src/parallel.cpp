#include "speclab/parallel.hpp"

#include <omp.h>

#include <atomic>

namespace speclab::par {

namespace {
std::atomic<int> g_threads{0};
}

int threads() {
  const int n = g_threads.load(std::memory_order_relaxed);
  return n > 0 ? n : omp_get_max_threads();
}

void set_threads(int n) { g_threads.store(n > 0 ? n : 0, std::memory_order_relaxed); }

}  // namespace speclab::par
