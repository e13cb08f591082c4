#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace stirring {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(replica) for replica in [0, count) on a bounded worker pool. The
// caller writes results into per-replica slots, so aggregation stays
// independent of scheduling. The first exception is rethrown after join.
template <typename Fn>
void parallel_replicas(int count, int threads, Fn&& fn) {
  const int workers = std::min(resolve_threads(threads), std::max(count, 1));
  if (count <= 0) return;
  if (workers <= 1) {
    for (int r = 0; r < count; ++r) fn(r);
    return;
  }

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto body = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= count || failed.load()) return;
      try {
        fn(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int i = 0; i < workers; ++i) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace stirring
