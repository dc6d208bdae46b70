#pragma once

#include <cstddef>
#include <functional>

namespace kinb {

// Worker count: KINB_THREADS if set, otherwise hardware concurrency.
int worker_count();

// Calls body(i) for i in [0, n) using static contiguous blocks.
void parallel_for(std::ptrdiff_t n, const std::function<void(std::ptrdiff_t)>& body);

} // namespace kinb
