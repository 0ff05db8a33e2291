#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace matpres {

/// Worker cap: MATPRES_THREADS if set (>= 1), else hardware concurrency.
inline int thread_budget() {
  if (const char* env = std::getenv("MATPRES_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run fn(i) for i in [0, count), split across the thread budget. Callers get
/// schedule independence by writing to disjoint, preallocated slots; any
/// cross-item reduction happens after the join, in index order.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  int workers = thread_budget();
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  if (static_cast<std::size_t>(workers) > count) workers = static_cast<int>(count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace matpres
