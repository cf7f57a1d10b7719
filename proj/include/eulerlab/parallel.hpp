#pragma once

#include <cstddef>
#include <functional>

namespace eulerlab {

// Worker count from EULERLAB_THREADS, else hardware concurrency.
int thread_count();

// Runs body(i) for i in [0, n). Each index is handled exactly once, so results
// written by index do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace eulerlab
