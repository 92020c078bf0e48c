#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace stressgraph {

/// Worker count: STRESSGRAPH_THREADS if set and positive, else hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("STRESSGRAPH_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [begin, end) over contiguous chunks. fn must only write
/// to state owned by index i.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn, std::size_t min_chunk = 64) {
  const std::size_t total = end > begin ? end - begin : 0;
  const std::size_t workers =
      std::min<std::size_t>(thread_count(), std::max<std::size_t>(1, total / min_chunk));
  if (workers <= 1) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  const std::size_t chunk = (total + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = begin + w * chunk;
    const std::size_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
}

}  // namespace stressgraph
