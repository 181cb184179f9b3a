#ifndef CQED_THREADPOOL_HPP
#define CQED_THREADPOOL_HPP

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace cqed {

/// Runs fn(0..n-1) on up to `threads` workers. Tasks are independent; each
/// writes only its own output slot, so assembly order never affects results.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next.fetch_add(1); k < n; k = next.fetch_add(1)) fn(k);
  };
  std::vector<std::thread> pool;
  const std::size_t count = std::min<std::size_t>(threads, n);
  pool.reserve(count);
  for (std::size_t k = 0; k < count; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

/// Default sweep concurrency: CASCADE_QED_THREADS if set, else the hardware
/// concurrency.
int default_thread_count();

}  // namespace cqed

#endif
