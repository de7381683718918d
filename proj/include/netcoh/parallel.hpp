#pragma once

#include <cstddef>
#include <functional>

namespace netcoh {

/// Worker count used when a call does not pass one explicitly. Starts at
/// NETCOH_THREADS when set, otherwise the hardware concurrency.
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, count). Iterations must be independent; the
/// outcome never depends on the schedule. Nested calls from inside a worker
/// run serially. The first exception (lowest index) is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  int threads = 0);

}  // namespace netcoh
