// parallel.hpp: minimal data-parallel loop over independent work items

#pragma once

#include <cstddef>
#include <functional>

namespace triwell {

// Worker count: TRIWELL_THREADS when set to a positive integer (capped by the
// hardware), otherwise std::thread::hardware_concurrency(), at least 1.
unsigned worker_count();

// Calls body(i) for i in [0, n) across worker_count() threads. The first exception
// thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace triwell
