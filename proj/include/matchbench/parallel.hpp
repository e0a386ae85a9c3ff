#pragma once

#include <cstddef>
#include <functional>

namespace matchbench {

// Worker count: MATCHBENCH_THREADS if set and positive, otherwise the
// hardware concurrency (at least 1).
std::size_t thread_count();

// Runs body(i) for i in [0, count). Work items are handed out in
// contiguous blocks; callers write results by index so the output does not
// depend on scheduling. The first exception thrown by any worker is
// rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t max_threads = 0);

}  // namespace matchbench
