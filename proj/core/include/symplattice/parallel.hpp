#pragma once

#include <cstddef>
#include <functional>

namespace symplattice {

// Worker count: explicit request if positive, else SYMPLATTICE_THREADS, else
// the number of logical cores.
unsigned resolve_threads(int requested);

// Run body(i) for i in [0, count). Work is handed out dynamically; results must
// be written to per-index slots so the outcome does not depend on scheduling.
// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace symplattice
