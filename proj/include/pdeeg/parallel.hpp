#pragma once

#include <cstddef>
#include <functional>

namespace pdeeg {

/// Runs body(i) for i in [0, n) on a pool of worker threads. Each index is
/// visited exactly once; callers write results into pre-sized slots so the
/// output does not depend on scheduling. Nested calls run inline on the
/// calling worker.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Worker count used by parallel_for (PDEEG_THREADS overrides the hardware
/// value).
std::size_t worker_count();

}  // namespace pdeeg
