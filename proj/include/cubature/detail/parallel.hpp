#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cubature::detail {

/// Chunked parallel map; fn(i) must write its result by index. Reduction
/// stays with the caller so float summation order is fixed regardless of
/// the thread count.
/// fn(worker, begin, end) is invoked once per worker with a contiguous
/// index range; worker ids are dense in [0, workers).
template <class Fn>
void parallel_for_chunks(std::int64_t n, int threads, Fn&& fn) {
  threads = std::max(1, threads);
  const int workers = static_cast<int>(std::max<std::int64_t>(
      1, std::min<std::int64_t>(threads, n)));
  if (workers == 1) {
    fn(0, std::int64_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t begin = n * w / workers;
    const std::int64_t end = n * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        fn(w, begin, end);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

template <class Fn>
void parallel_for(std::int64_t n, int threads, Fn&& fn) {
  parallel_for_chunks(n, threads, [&fn](int, std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) fn(i);
  });
}

}  // namespace cubature::detail
