#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace ilg {

// Static block partition of [0, n) over up to `threads` workers. Every
// fn(i) must be independent of the others; callers that need determinism
// reduce the per-index results in index order afterwards.
template <typename Fn>
void parallel_for(std::size_t n, int threads, const Fn& fn) {
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(n, threads < 1 ? 1 : static_cast<std::size_t>(threads));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    const std::size_t lo = n * t / workers;
    const std::size_t hi = n * (t + 1) / workers;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace ilg
