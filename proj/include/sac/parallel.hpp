#ifndef SAC_PARALLEL_HPP
#define SAC_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sac {

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency).  Work items must be independent; the first exception is
/// rethrown on the calling thread after all workers join.
template <class Fn>
void parallel_for_index(int n, int threads, Fn&& fn) {
  if (n <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  int workers = threads > 0 ? threads : static_cast<int>(hw);
  if (workers > n) workers = n;
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace sac

#endif  // SAC_PARALLEL_HPP
