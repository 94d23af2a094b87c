#pragma once

#include <cstddef>
#include <functional>

namespace specfloor {

// Worker cap: SPECFLOOR_THREADS if set and positive, else the hardware count.
std::size_t thread_limit();

// Runs body(i) for i in [0, count). Each index is handled exactly once; the
// caller owns any reduction, which keeps results independent of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)> &body);

} // namespace specfloor
