#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace bchain {

/// Number of worker threads to use when the caller passes 0.
inline std::size_t default_threads() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Evaluates fn(i) for i in [0, count) on up to `threads` workers and returns
/// the results ordered by i. Work is handed out one index at a time; each
/// result is owned by its slot, so the output does not depend on the thread
/// count or on scheduling. The first exception thrown by any fn is rethrown.
template <class Fn>
auto map_replicas(std::size_t count, std::size_t threads, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<std::optional<Result>> slots(count);
  if (threads == 0) {
    threads = default_threads();
  }
  threads = std::min(threads, std::max<std::size_t>(count, 1));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) {
        return;
      }
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        next.store(count);
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back(worker);
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  std::vector<Result> out;
  out.reserve(count);
  for (auto& slot : slots) {
    out.push_back(std::move(*slot));
  }
  return out;
}

}  // namespace bchain
