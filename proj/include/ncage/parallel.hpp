#pragma once

#include <cstddef>
#include <functional>

namespace ncage {

// Worker cap shared by every parallel section; 0 means hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

// Calls fn(i) for every i in [0, count), spread over up to max_threads()
// workers. Work items must be independent; the first exception thrown by any
// item is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace ncage
