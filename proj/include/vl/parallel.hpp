#pragma once

#include <cstddef>
#include <functional>

namespace vl {

/// Worker count used by grid evaluations. 0 selects hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, n) over contiguous chunks. Each index must write
/// only its own output slot; results are then independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace vl
