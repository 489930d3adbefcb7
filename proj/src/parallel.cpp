#include "rocket/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rocket {

namespace {
std::atomic<std::size_t> g_thread_cap{0};
}

void set_thread_cap(std::size_t cap) { g_thread_cap.store(cap); }

std::size_t thread_cap() {
  std::size_t cap = g_thread_cap.load();
  if (cap == 0) cap = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  return cap;
}

std::size_t resolve_threads(std::size_t requested) {
  const std::size_t cap = thread_cap();
  if (requested == 0) return cap;
  // An explicit cap set by the user bounds explicit requests too.
  if (g_thread_cap.load() != 0) return std::min(requested, cap);
  return requested;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(resolve_threads(threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace rocket
