#pragma once

#include <cstdint>
#include <functional>

namespace ncpd {

/// Resolve a worker count: a positive request wins, then the NCPD_THREADS
/// environment variable, then hardware concurrency (at least 1).
[[nodiscard]] int resolve_threads(int requested = 0);

/// Run fn(i) for every i in [0, n) on up to `threads` workers. Results must be
/// written to index-addressed storage by the caller, so the outcome does not
/// depend on scheduling. The first exception raised by any worker is rethrown.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn);

/// Run fn(begin, end) over a partition of [0, n) into at most `threads`
/// contiguous chunks. Used where each worker carries per-chunk state.
void parallel_chunks(std::int64_t n, int threads,
                     const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace ncpd
