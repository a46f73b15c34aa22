#include "stereodecomp/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace stereodecomp {

int worker_count() {
  int n = 0;
  if (const char* env = std::getenv("STEREO_DECOMP_THREADS")) {
    n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, n);
}

void parallel_rows(int rows, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), rows);
  if (workers <= 1 || rows <= 1) {
    for (int r = 0; r < rows; ++r) fn(r);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const int chunk = (rows + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    const int begin = t * chunk;
    const int end = std::min(rows, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      for (int r = begin; r < end; ++r) fn(r);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace stereodecomp
