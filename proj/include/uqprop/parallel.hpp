#pragma once

#include <cstddef>
#include <functional>

namespace uqprop::parallel {

/// Worker thread count: the UQPROP_THREADS environment variable when set to a
/// positive integer, otherwise the hardware concurrency (at least 1).
std::size_t default_thread_count();

/// Runs task(i) for every i in [0, count) on up to `threads` workers
/// (0 means default_thread_count()). Tasks must write to disjoint outputs.
/// The first exception thrown by any task is rethrown after all workers join.
void for_each_index(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& task);

}  // namespace uqprop::parallel
