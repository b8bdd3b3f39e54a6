#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace cohort_pulse {

/// Thread cap from COHORT_PULSE_THREADS, else hardware concurrency. Always
/// at least 1.
size_t effective_thread_count(size_t requested = 0);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Tasks must write
/// only to their own slots so results are identical for any thread count.
/// The first exception thrown by a task is rethrown on the caller.
void parallel_for(size_t n, size_t threads, const std::function<void(size_t)>& fn);

}  // namespace cohort_pulse
