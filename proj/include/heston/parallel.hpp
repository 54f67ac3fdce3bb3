#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace heston {

// worker cap: min(hardware, LAQ_THREADS when set)
inline unsigned max_workers() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("LAQ_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && static_cast<unsigned>(v) < hw) hw = static_cast<unsigned>(v);
    }
    return hw;
}

// Static block partition of [0, n) across threads. Each index is processed
// exactly once and results must be written to disjoint slots, so the
// outcome does not depend on the number of workers.
template <class Fn>
void parallel_for(std::int64_t n, Fn&& fn) {
    const std::int64_t workers = std::min<std::int64_t>(max_workers(), std::max<std::int64_t>(n, 1));
    if (workers <= 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::int64_t chunk = (n + workers - 1) / workers;
    for (std::int64_t w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::int64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace heston
