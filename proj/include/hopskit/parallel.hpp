// parallel.hpp - static work distribution over std::thread

#pragma once

#include <cstddef>
#include <functional>

namespace hops {

// Worker count: the set_thread_count value if nonzero, else HOPSKIT_THREADS
// if set and positive, else hardware concurrency.
unsigned thread_count();

// Process-wide override of the worker count; zero restores the default.
void set_thread_count(unsigned n) noexcept;

// Calls fn(i) for i in [0, n) on up to thread_count() threads. Indices are
// handed out dynamically; callers must write results into per-index slots.
// The first exception thrown by any fn is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace hops
