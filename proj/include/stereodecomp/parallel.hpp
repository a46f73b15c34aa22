#pragma once

#include <functional>

namespace stereodecomp {

// Worker count: STEREO_DECOMP_THREADS caps it, 0 or unset means auto.
int worker_count();

// Runs fn(row) for row in [0, rows) on contiguous row chunks. Callers must
// only write to row-local outputs; results are then independent of the
// schedule and of the worker count.
void parallel_rows(int rows, const std::function<void(int)>& fn);

}  // namespace stereodecomp
