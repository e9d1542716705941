#pragma once

#include <functional>

namespace biotms {

/// Worker count from BIOTMS_WORKERS, defaulting to the hardware concurrency.
int worker_count();

/// Runs body(0..count-1) on up to `workers` threads. Each index must write
/// only to its own output slot. The first exception thrown is rethrown.
void parallel_for(int count, const std::function<void(int)>& body, int workers = worker_count());

}  // namespace biotms
