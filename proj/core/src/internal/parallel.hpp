#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace styledrift::internal {

// Index-stable parallel map: out[i] = fn(items[i]). Worker threads own
// disjoint index ranges, so results are deterministic regardless of
// scheduling; the first worker exception is rethrown.
template <typename T, typename Fn>
auto parallel_map(const std::vector<T>& items, Fn fn)
    -> std::vector<decltype(fn(items[0]))> {
  using Out = decltype(fn(items[0]));
  std::vector<Out> results(items.size());
  if (items.empty()) return results;

  const std::size_t hw = std::thread::hardware_concurrency();
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(hw, items.size()));
  if (n_threads == 1) {
    for (std::size_t i = 0; i < items.size(); ++i) results[i] = fn(items[i]);
    return results;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  const std::size_t chunk = (items.size() + n_threads - 1) / n_threads;
  for (std::size_t t = 0; t < n_threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(items.size(), begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) results[i] = fn(items[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (std::thread& worker : workers) worker.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

}  // namespace styledrift::internal
