#pragma once

#include <cstddef>
#include <functional>

namespace splitring {

/// Worker count: SPLITRING_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t worker_count();

/// Calls fn(i) for every i in [0, n). Each index is handled exactly once;
/// callers write results into pre-sized slots so output order never depends
/// on scheduling. The first exception thrown by fn is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace splitring
