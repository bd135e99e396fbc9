#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace entroflow {

/// Evaluates fn(i) for i in [0, n) on up to `workers` threads. Results are
/// stored by index, so the output never depends on the worker count. If any
/// call throws, the exception from the lowest index is rethrown.
template <typename Fn>
auto parallel_map(int n, int workers, Fn fn) -> std::vector<decltype(fn(0))> {
  using T = decltype(fn(0));
  std::vector<T> out(static_cast<std::size_t>(std::max(n, 0)));
  std::vector<std::exception_ptr> errors(out.size());
  workers = std::clamp(workers, 1, std::max(n, 1));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  auto run = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        out[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace entroflow
