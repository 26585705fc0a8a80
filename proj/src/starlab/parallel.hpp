#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace starlab {

// Worker cap, read from STARLAB_THREADS (default: hardware concurrency).
int worker_count();
void set_worker_count(int workers);  // 0 restores the environment default

// Calls body(begin, end) over a static partition of [0, count). Each index is
// visited exactly once; callers write results to per-index slots only.
void parallel_chunks(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

// Fixed-shape pairwise summation; the result is independent of worker count.
double pairwise_sum(std::span<const double> values);

}  // namespace starlab
