#pragma once

#include <cstddef>
#include <functional>

namespace hetnet {

/// Worker count to use: `requested` (or the hardware concurrency when 0),
/// capped by the HETSIM_THREADS environment variable when it is set.
unsigned worker_count(unsigned requested = 0);

/// Runs body(i) for every i in [0, n) on up to `workers` threads. Callers
/// write results into per-index slots, so output never depends on the
/// worker count or completion order. The first exception is rethrown.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace hetnet
