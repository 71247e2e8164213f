#pragma once

#include <cstdint>
#include <functional>

namespace wncs {

/// Worker count: WNCS_THREADS when set to a positive integer, otherwise the
/// hardware concurrency.
int WorkerCount();

/// Runs body(chunk) for every chunk in [0, num_chunks) on up to
/// WorkerCount() threads. Callers write results into per-chunk slots and
/// merge them in chunk order, so output never depends on the thread count.
void ParallelForChunks(int64_t num_chunks,
                       const std::function<void(int64_t)>& body);

}  // namespace wncs
