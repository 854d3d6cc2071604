#pragma once

#include <cstddef>
#include <functional>

namespace anncalc {

// Worker cap: the ANN_CALC_THREADS environment variable when set to a
// positive integer, otherwise the hardware concurrency (at least 1).
int worker_count();

// Runs fn(0..count-1) across up to worker_count() threads with static
// striding. Callers write results into pre-sized slots indexed by i, so
// output layout never depends on scheduling. The first exception thrown by
// any worker is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace anncalc
