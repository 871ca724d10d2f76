#include "ncpd/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ncpd {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NCPD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_chunks(std::int64_t n, int threads,
                     const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (n <= 0) return;
  const int workers = std::max(1, std::min<std::int64_t>(threads, n) > 0
                                      ? static_cast<int>(std::min<std::int64_t>(threads, n))
                                      : 1);
  if (workers == 1) {
    fn(0, n);
    return;
  }

  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto guarded = [&](std::int64_t lo, std::int64_t hi) {
    try {
      fn(lo, hi);
    } catch (...) {
      std::lock_guard lock(err_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers) - 1);
  const std::int64_t base = n / workers, extra = n % workers;
  std::int64_t lo = 0;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t hi = lo + base + (w < extra ? 1 : 0);
    if (w + 1 == workers) {
      guarded(lo, hi);  // run the last chunk on the calling thread
    } else {
      pool.emplace_back(guarded, lo, hi);
    }
    lo = hi;
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn) {
  parallel_chunks(n, threads, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) fn(i);
  });
}

}  // namespace ncpd
