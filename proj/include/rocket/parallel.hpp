#pragma once

#include <cstddef>
#include <functional>

namespace rocket {

/// Process-wide cap on worker threads (0 = hardware concurrency).
void set_thread_cap(std::size_t cap);
std::size_t thread_cap();

/// Number of workers to use for a request of `requested` threads (0 = use the cap).
std::size_t resolve_threads(std::size_t requested);

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// visited exactly once; the first exception thrown is rethrown after all
/// workers have joined.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace rocket
