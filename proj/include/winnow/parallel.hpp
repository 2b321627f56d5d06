#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace winnow {

// Worker count resolution: explicit value > WINNOW_WORKERS env > hardware.
inline unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("WINNOW_WORKERS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Runs fn(begin, end) over contiguous index chunks. Results land in
// caller-owned per-index slots, so output content and order never depend on
// the worker count (the pipeline's determinism contract).
inline void parallel_chunks(std::size_t n, unsigned workers,
                            const std::function<void(std::size_t, std::size_t)>& fn) {
    workers = std::max(1u, workers);
    if (n == 0) return;
    if (workers == 1 || n < 2 * workers) {
        fn(0, n);
        return;
    }
    std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t begin = 0; begin < n; begin += chunk) {
        std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back(fn, begin, end);
    }
    for (auto& t : pool) t.join();
}

} // namespace winnow
