#pragma once

#include <cstddef>
#include <functional>

namespace ghost {

// Worker count: GHOST_SCALER_THREADS if set and positive, otherwise the
// machine's hardware concurrency (at least 1).
std::size_t default_thread_count();

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = default).
// Exceptions thrown by body are rethrown on the calling thread; the one with
// the lowest index wins so failures are reproducible.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace ghost
