#include "delfi/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>
#include <stdexcept>

namespace delfi {

namespace {

int env_thread_cap() {
    const char* env = std::getenv("DEL_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) return 0;
    return static_cast<int>(v);
}

std::atomic<int> g_override{-1};  // -1: not set, 0: env/default, >0: explicit

}  // namespace

int engine_threads() {
    int ov = g_override.load(std::memory_order_relaxed);
    if (ov < 0) {
        ov = env_thread_cap();
        g_override.store(ov, std::memory_order_relaxed);
    }
    int hw = omp_get_max_threads();
    if (ov > 0 && ov < hw) return ov;
    return hw;
}

void set_engine_threads(int n) {
    g_override.store(n > 0 ? n : 0, std::memory_order_relaxed);
}

namespace detail {

void parallel_run(std::ptrdiff_t count, const std::function<void(std::ptrdiff_t)>& body) {
    if (count <= 0) return;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    const int threads = engine_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            body(i);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    // lowest index wins so diagnostics do not depend on the thread count
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace detail

}  // namespace delfi
