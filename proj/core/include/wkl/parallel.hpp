#pragma once

#include <cstddef>
#include <functional>

namespace wkl {

// Worker count: WKL_THREADS if set, else hardware concurrency.
int worker_count();

// Calls body(i) for i in [0, n). Work is split into contiguous index ranges,
// so results written by index are identical for any worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace wkl
