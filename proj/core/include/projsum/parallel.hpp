#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace projsum {

/// Worker count for parallel maps: hardware concurrency capped by the
/// PROJSUM_THREADS environment variable, unless set_thread_limit() forced a
/// count.
std::size_t thread_count();

/// Forces an exact worker count for the current process, possibly above the
/// hardware concurrency (0 restores the default).
void set_thread_limit(std::size_t limit);

/// Calls fn(i) for every i in [0, count). Work is split into contiguous
/// index blocks; callers write results into slot i, so the outcome does not
/// depend on the number of threads. The first exception thrown by any task
/// is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t block = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * block;
    const std::size_t end = std::min(count, begin + block);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace projsum
