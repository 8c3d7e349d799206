#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace sar {

inline int worker_count() {
  if (const char* env = std::getenv("SARPIPE_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs f(i) for i in [0, count). Each index is owned by exactly one worker,
// so outputs written to disjoint slots are independent of the thread count.
template <typename Func>
void par_for(std::size_t count, Func&& f) {
  int workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([w, workers, count, &f] {
      for (std::size_t i = w; i < count; i += workers) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

} // namespace sar
