#pragma once

// Deterministic fork-join helper. Work items are pure and write to
// preallocated slots, so results are identical for any thread count. The
// QCC_THREADS environment variable caps parallelism.

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace qcc {

inline int thread_budget() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("QCC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<int>(std::min<long>(v, 256));
    }
    return hw;
}

// Runs body(i) for i in [0, n). Exceptions are captured and the first one
// (lowest chunk index) is rethrown after all threads join.
template <typename Body>
void parallel_for(std::size_t n, const Body& body) {
    if (n == 0) return;
    const int budget = thread_budget();
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(budget), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        threads.emplace_back([&, lo, hi, w]() {
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace qcc
