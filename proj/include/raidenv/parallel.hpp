#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace raidenv {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Indices are handed
// out from a shared counter; callers write results into slot i, so the
// outcome never depends on the worker count. The first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t w = std::clamp<std::size_t>(workers < 1 ? 1 : static_cast<std::size_t>(workers), 1, std::max<std::size_t>(n, 1));
  if (w == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> threads;
  threads.reserve(w);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  for (std::size_t t = 0; t < w; ++t) {
    threads.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < n && !failed; i = next++) fn(i);
      } catch (...) {
        failed = true;
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace raidenv
