#pragma once

#include <functional>

namespace astar {

/// Worker count used by data-parallel kernels. Defaults to 1.
int jobs();
/// Sets the worker count; values below 1 are clamped to 1.
void set_jobs(int n);

/// Calls body(i) for i in [0, n), split into contiguous blocks over jobs()
/// threads. The first exception thrown by any block is rethrown.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace astar
