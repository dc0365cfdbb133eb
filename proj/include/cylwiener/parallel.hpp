#pragma once

#include <cstdint>
#include <functional>

namespace cylwiener {

/// Global cap on worker threads. 1 means strictly serial execution,
/// 0 means hardware concurrency.
int max_threads();
void set_max_threads(int n);

/// Runs fn(i) for i in [0, n). Work items must write to disjoint memory;
/// under that contract results are bit-identical in serial and parallel
/// runs (all reductions in this library are performed serially afterwards).
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

}  // namespace cylwiener
