#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace sigf {

// Thread cap: SIGF_THREADS if set, otherwise hardware concurrency.
inline unsigned thread_limit() {
    if (const char* env = std::getenv("SIGF_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

// Static-chunk parallel loop over [0, count). Only used where iterations
// write disjoint locations, so the result is identical for any thread count.
template <class Fn>
void parallel_for(std::int64_t count, Fn&& fn) {
    const unsigned threads = thread_limit();
    if (threads <= 1 || count < 256) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const unsigned used = static_cast<unsigned>(
        std::min<std::int64_t>(threads, (count + 255) / 256));
    std::vector<std::thread> pool;
    pool.reserve(used);
    const std::int64_t chunk = (count + used - 1) / used;
    for (unsigned t = 0; t < used; ++t) {
        const std::int64_t lo = t * chunk;
        const std::int64_t hi = std::min<std::int64_t>(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::int64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace sigf
