#pragma once

// Deterministic parallel map over independent jobs.

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace ppgkit {

/// Worker count: PPGKIT_THREADS if set to a positive integer, else hardware concurrency (>= 1).
int worker_count();

/// Calls job(i) for i in [0, n) on up to worker_count() threads.  Each index runs
/// exactly once; the first exception (by index) is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& job);

/// results[i] = job(i), assembled in index order regardless of scheduling.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, F&& job) {
  std::vector<T> results(n);
  parallel_for(n, [&](std::size_t i) { results[i] = job(i); });
  return results;
}

}  // namespace ppgkit
