#pragma once

#include <cstddef>
#include <functional>

namespace h1ns {

/// Cap on worker threads used by library loops. 0 means hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

/// Runs body(i) for i in [0, n). Each index is processed by exactly one
/// worker, so results written per index do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace h1ns
