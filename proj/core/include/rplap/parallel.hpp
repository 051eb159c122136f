// Bounded worker fan-out for ensemble loops. Results must go into
// preallocated per-index slots; nested sections run inline so a parallel
// region never oversubscribes.
#pragma once

#include <functional>

namespace rplap {

// RENORM_PLAP_THREADS when set (>= 1), hardware concurrency otherwise.
int worker_count();

void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace rplap
