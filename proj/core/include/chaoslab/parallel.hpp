#pragma once

#include <cstddef>
#include <functional>

namespace chaoslab {

// Worker count: CHAOSLAB_THREADS if set, else hardware concurrency (>= 1).
unsigned default_thread_count();

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
// processed exactly once; callers write results into slot i so reductions in
// index order are independent of the worker count. The first exception thrown
// by any body is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace chaoslab
