#ifndef MDYN_SRC_PARALLEL_HPP
#define MDYN_SRC_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mdyn::detail {

inline std::size_t worker_count(std::size_t count) {
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(hw, count));
}

/// Calls fn(worker, r) for r in [0, count) across hardware threads; worker w
/// handles r = w, w + W, ... Per-worker state sized by worker_count(count)
/// may be indexed by `worker`.
template <class Fn>
void for_each_replica(std::size_t count, Fn&& fn) {
  const std::size_t workers = worker_count(count);
  if (workers == 1) {
    for (std::size_t r = 0; r < count; ++r) fn(std::size_t{0}, r);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t r = w; r < count; r += workers) fn(w, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mdyn::detail

#endif  // MDYN_SRC_PARALLEL_HPP
