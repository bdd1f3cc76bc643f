#pragma once

#include <cstddef>
#include <functional>

namespace srlab {

// Number of worker threads used by parallelFor.  0 means hardware concurrency.
void setThreadCount(int n);
int threadCount();
// Per-thread override of threadCount() (0 clears it), used when several
// independent jobs already share the workers.
void setLocalThreadCount(int n);

// Runs body(i) for i in [0, n) over static contiguous chunks.  Callers write
// results into per-index slots, so outputs never depend on the thread count.
void parallelFor(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace srlab
