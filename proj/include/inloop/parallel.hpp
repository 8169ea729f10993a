#pragma once

#include <cstddef>
#include <functional>

namespace inloop {

/// Worker threads for job pools: INLOOP_WORKERS if set to a positive
/// integer, otherwise the hardware concurrency (at least 1).
int worker_count();

/// Runs body(0..count-1) over a pool of `workers` threads (0 = worker_count()).
/// Each job writes only its own output slot, so results do not depend on
/// scheduling. The exception of the lowest failing job is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, int workers = 0);

} // namespace inloop
