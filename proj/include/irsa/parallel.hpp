#pragma once

#include <cstddef>
#include <functional>

namespace irsa {

// Worker count from IRSA_WORKERS, else the hardware concurrency (at least 1).
std::size_t worker_count();

// Runs fn(index) for index in [0, n) on worker_count() threads. Each index
// runs exactly once; the first exception thrown is rethrown after all
// workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace irsa
