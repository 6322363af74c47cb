#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace pac {

/// Number of workers to use for `n_tasks` independent tasks.
/// `max_workers` <= 0 means "all hardware threads".
int resolve_workers(std::size_t n_tasks, int max_workers);

/// Runs fn(0..n_tasks-1) on a pool of at most `max_workers` threads.
/// Tasks must write to disjoint outputs; completion order is unspecified.
void parallel_for(std::size_t n_tasks, int max_workers, const std::function<void(std::size_t)>& fn);

}  // namespace pac
