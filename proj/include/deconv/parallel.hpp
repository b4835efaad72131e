#pragma once

#include <cstddef>
#include <functional>

namespace deconv {

/// Worker count: DECONV_THREADS when set to a positive integer, otherwise
/// std::thread::hardware_concurrency() (at least 1).
std::size_t worker_count();

/// Runs body(i) for every i in [0, tasks). Tasks are handed out dynamically;
/// callers write results into per-task slots and reduce them afterwards in
/// index order, so output never depends on the worker count. The first
/// exception thrown by any task is rethrown on the calling thread.
void parallel_for(std::size_t tasks, const std::function<void(std::size_t)>& body);

}  // namespace deconv
