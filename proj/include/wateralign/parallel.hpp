#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace wateralign {

/// Name of the environment variable holding the worker count.
inline constexpr const char* kThreadsEnv = "WATERALIGN_THREADS";

/// requested if nonzero, else $WATERALIGN_THREADS, else hardware concurrency.
unsigned worker_count(unsigned requested = 0);

/// Calls body(i) for i in [0, n) on up to `workers` threads. Order of
/// execution is unspecified; the first exception thrown is rethrown.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const auto count = std::min<std::size_t>(workers, n);
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace wateralign
