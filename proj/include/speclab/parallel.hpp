#pragma once

// OpenMP reduction helpers with a schedule-independent summation order.
//
// Every parallel sum splits [0, n) into fixed blocks of kBlock indices. Each
// block is summed sequentially, in parallel across blocks, and the block
// partials are then added in block order on one thread. The result is
// therefore bit-identical for any thread count. The *_serial variants are
// plain left-to-right loops kept as test and benchmark references.

#include <complex>
#include <cstddef>
#include <vector>

namespace speclab::par {

inline constexpr std::size_t kBlock = 2048;

// Number of OpenMP threads used by speclab kernels (defaults to the runtime's).
int threads();
void set_threads(int n);

template <class T, class F>
T block_sum(std::size_t n, F&& f) {
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  if (nblocks <= 1) {
    T acc{};
    for (std::size_t i = 0; i < n; ++i) acc += f(i);
    return acc;
  }
  std::vector<T> partial(nblocks, T{});
  const long long nb = static_cast<long long>(nblocks);
#pragma omp parallel for schedule(static) num_threads(threads())
  for (long long b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = lo + kBlock < n ? lo + kBlock : n;
    T acc{};
    for (std::size_t i = lo; i < hi; ++i) acc += f(i);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  T total{};
  for (const T& p : partial) total += p;
  return total;
}

template <class F>
double sum(std::size_t n, F&& f) {
  return block_sum<double>(n, std::forward<F>(f));
}

template <class F>
std::complex<double> csum(std::size_t n, F&& f) {
  return block_sum<std::complex<double>>(n, std::forward<F>(f));
}

template <class F>
double sum_serial(std::size_t n, F&& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += f(i);
  return acc;
}

// Independent per-index work, e.g. filling rows of a matrix.
template <class F>
void for_each(std::size_t n, F&& f) {
  const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads())
  for (long long i = 0; i < nn; ++i) f(static_cast<std::size_t>(i));
}

}  // namespace speclab::par
