#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <utility>
#include <vector>

namespace delfi {

// Number of threads the engine may use. Capped by the DEL_THREADS environment
// variable (read once); never larger than the OpenMP pool.
int engine_threads();

// Override the cap (tests, CLI). n <= 0 restores the environment default.
void set_engine_threads(int n);

namespace detail {

void parallel_run(std::ptrdiff_t count, const std::function<void(std::ptrdiff_t)>& body);

}  // namespace detail

// Runs body(0..count-1) on the engine pool. Exceptions are captured per index
// and the lowest-index one is rethrown, so failure reporting does not depend
// on the thread count.
template <class F>
void parallel_for_indexed(std::ptrdiff_t count, F&& body) {
    std::function<void(std::ptrdiff_t)> fn = std::forward<F>(body);
    detail::parallel_run(count, fn);
}

}  // namespace delfi
