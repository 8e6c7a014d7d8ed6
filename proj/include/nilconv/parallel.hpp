#pragma once

#include <cstddef>
#include <functional>

namespace nilconv {

/// Worker count used by parallel_for. 0 means hardware concurrency.
void set_jobs(unsigned n);
unsigned jobs();

/// Runs body(i) for i in [0, n). Each index is handled by exactly one
/// worker, so results written per index are independent of scheduling.
/// Calls made from inside a worker run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace nilconv
