#pragma once

#include <cstddef>
#include <functional>

namespace qdesign {

// Worker count: hardware concurrency, capped by the QDESIGN_THREADS
// environment variable when it holds a positive integer.
int max_threads();

// Runs body(i) for i in [0, n). Results must be written by index; scheduling
// does not affect them. The exception from the lowest failing index is
// rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qdesign
