#pragma once

#include <cstddef>
#include <functional>

namespace vulnpricer {

/// Worker count: VULNPRICER_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
[[nodiscard]] std::size_t worker_count();

/// Runs task(i) for i in [0, n_tasks) on up to worker_count() threads.
/// Tasks must write to disjoint outputs. The first exception thrown is
/// rethrown after all workers stop.
void parallel_for(std::size_t n_tasks, const std::function<void(std::size_t)>& task);

}  // namespace vulnpricer
