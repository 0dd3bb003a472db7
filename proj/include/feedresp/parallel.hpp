#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace feedresp {

/// Runs body(i) for i in [0, count) on a fixed pool of threads. Work items
/// must be independent; callers that reduce results do so afterwards in
/// index order, so results do not depend on the thread count. The first
/// exception thrown by any item is rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t count, Body&& body, std::size_t min_chunk = 16) {
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t chunks = (count + min_chunk - 1) / std::max<std::size_t>(1, min_chunk);
  const std::size_t workers = std::min(hw, chunks);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < count; i += workers) body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace feedresp
