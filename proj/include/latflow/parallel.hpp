#pragma once

#include <cstddef>
#include <functional>

namespace latflow {

/// Worker count: LATFLOW_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
unsigned thread_count();

/// Calls body(i) for i in [0, n) on up to thread_count() threads. Indices
/// are split into fixed contiguous blocks, so results written per index do
/// not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace latflow
