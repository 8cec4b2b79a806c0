#pragma once

#include <cstddef>
#include <functional>

namespace lightcone {

// Worker count for node-level loops: LIGHTCONE_THREADS when set and positive,
// otherwise the hardware concurrency (at least 1).
std::size_t thread_count();

// Runs body(i) for i in [0, count). Each index is visited exactly once; the
// caller writes results into pre-sized per-index slots so the reduction
// order stays independent of scheduling. The exception from the lowest failing
// index is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace lightcone
