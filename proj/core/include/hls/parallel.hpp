#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace hls {

/// Worker cap from HLS_THREADS; absent or invalid means single-threaded.
inline int thread_cap() {
    static const int cap = [] {
        const char* env = std::getenv("HLS_THREADS");
        if (!env) return 1;
        int v = std::atoi(env);
        if (v < 1) return 1;
        unsigned hw = std::thread::hardware_concurrency();
        return std::min<int>(v, hw > 0 ? static_cast<int>(hw) : v);
    }();
    return cap;
}

/// Runs body(i) for i in [0, n). Work is split into contiguous index ranges,
/// one per worker, so per-index results do not depend on the thread count.
/// Bodies must write only to locations owned by their index.
template <typename Body>
void parallel_for(int n, Body&& body) {
    const int threads = std::min(thread_cap(), n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (int i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace hls
