#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pickands {

/// Evaluates fn(i) for i in [0, n) on `workers` threads and returns the
/// results in index order. Work is handed out in blocks; the result of each
/// index is independent of which thread computed it.
template <class Result, class Fn>
std::vector<Result> run_replicates(std::size_t n, unsigned workers, Fn&& fn) {
  std::vector<Result> out(n);
  if (n == 0) return out;
  workers = std::max(1u, workers);
  constexpr std::size_t kBlock = 256;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(kBlock);
        if (begin >= n) return;
        const std::size_t end = std::min(n, begin + kBlock);
        for (std::size_t i = begin; i < end; ++i) out[i] = fn(i);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(n);
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace pickands
