#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sgm {

// Process-wide default worker count (CLI --threads lands here). 0 = hardware.
int default_threads();
void set_default_threads(int threads);
int resolve_threads(int requested);  // requested<=0 -> default

// Static block partition of [0,n) over `threads` workers; fn(i) must only write
// to slot i of caller-owned storage, which keeps results schedule-independent.
// The first exception (if any) is rethrown in the caller.
template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = resolve_threads(threads);
  if (n <= 0) return;
  if (threads <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  if (threads > n) threads = n;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::exception_ptr first_error = nullptr;
  std::mutex err_mutex;
  for (int w = 0; w < threads; ++w) {
    const int lo = static_cast<int>(static_cast<long long>(n) * w / threads);
    const int hi = static_cast<int>(static_cast<long long>(n) * (w + 1) / threads);
    pool.emplace_back([&, lo, hi]() {
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace sgm
