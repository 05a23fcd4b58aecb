#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace bip {

// Runs fn(task_index) for every index in [0, num_tasks) on `workers`
// threads (0 = hardware concurrency). The first exception thrown by fn is
// rethrown on the calling thread after all workers finish.
inline void parallel_tasks(std::size_t num_tasks, int workers,
                           const std::function<void(std::size_t)>& fn) {
  unsigned n = workers > 0
                   ? static_cast<unsigned>(workers)
                   : std::max(1u, std::thread::hardware_concurrency());
  if (n <= 1 || num_tasks <= 1) {
    for (std::size_t i = 0; i < num_tasks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(n);
  for (unsigned t = 0; t < n; ++t) {
    threads.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < num_tasks;
           i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace bip
