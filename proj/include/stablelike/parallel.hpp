#pragma once

// Deterministic path-indexed fan-out: workers fill disjoint index blocks of a
// preallocated result array, aggregation happens afterwards in index order,
// so totals are identical for any worker count.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace stablelike {

inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t thread_count = std::min<std::size_t>(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(thread_count);
  std::exception_ptr first_error = nullptr;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < thread_count; ++w) {
    const std::size_t lo = n * w / thread_count;
    const std::size_t hi = n * (w + 1) / thread_count;
    pool.emplace_back([&, lo, hi]() {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace stablelike
