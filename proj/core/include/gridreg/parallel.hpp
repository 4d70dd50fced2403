#pragma once

#include <cstddef>
#include <functional>

namespace gridreg {

/// Worker count: GRIDREG_THREADS if set to a positive integer, otherwise
/// std::thread::hardware_concurrency() (at least 1).
int worker_count();

/// Runs body(i) for i in [0, n), split into contiguous chunks over at most
/// worker_count() threads. Callers write results to index-addressed slots so
/// output never depends on scheduling. The first exception thrown by any
/// worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gridreg
