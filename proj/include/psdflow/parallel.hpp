#pragma once

#include <cstddef>
#include <functional>

namespace psdflow {

/// Worker count: PSDFLOW_THREADS if set and positive, else hardware concurrency (min 1).
unsigned default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = default_thread_count()).
/// Indices are claimed dynamically; callers write results into slot i so the outcome
/// does not depend on scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace psdflow
