#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace zn {

// Process-wide cap set by the CLI --threads flag. 1 means run inline.
inline std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{1};
  return cap;
}

inline void set_thread_cap(int t) { thread_cap() = std::max(1, t); }

// Evaluates fn(i) for i in [0, count) and returns the results in index order.
// The MPFR default precision is process-global, so workers inherit it.
template <class T>
std::vector<T> parallel_map(size_t count, const std::function<T(size_t)>& fn) {
  std::vector<T> out(count);
  const int threads = static_cast<int>(std::min<size_t>(thread_cap().load(), count));
  if (threads <= 1) {
    for (size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (size_t i = next++; i < count; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace zn
