#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace adacp {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, count) across up to `threads` workers.
// Work is striped by index; callers must write results into per-index slots so
// the outcome does not depend on the number of threads. The first exception
// thrown by any worker is rethrown on the calling thread.
inline void parallel_for(int64_t count, int threads, const std::function<void(int64_t)>& fn) {
    threads = std::min<int64_t>(resolve_threads(threads), std::max<int64_t>(count, 1));
    if (threads <= 1) {
        for (int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(threads);
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            try {
                for (int64_t i = t; i < count; i += threads) fn(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace adacp
