#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace autdrift::detail {

// Σ_{i<n} f(i) with the index range split across threads. Integer sums are
// order independent, so the result is deterministic.
template <typename F>
std::int64_t parallel_sum(std::size_t n, F&& f) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = n < 2048 ? 1 : std::min<std::size_t>(hw, 16);
  if (workers == 1) {
    std::int64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) total += f(i);
    return total;
  }
  std::vector<std::int64_t> partial(workers, 0);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
        std::int64_t s = 0;
        for (std::size_t i = lo; i < hi; ++i) s += f(i);
        partial[w] = s;
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::int64_t total = 0;
  for (auto s : partial) total += s;
  return total;
}

}  // namespace autdrift::detail
