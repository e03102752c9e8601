#pragma once

#include <cstddef>
#include <functional>

namespace mixedcurv {

// Global worker count for parallel loops (default: hardware concurrency).
// Results must not depend on it: workers write to disjoint indices and any
// reduction happens afterwards in index order.
void set_thread_count(int n);
int thread_count();

// Runs fn(i) for i in [0, count) across thread_count() workers.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace mixedcurv
