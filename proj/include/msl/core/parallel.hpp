#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace msl {

/// Process-wide cap on worker threads; set once by the CLI (--threads).
inline int& thread_limit() {
    static int n = 1;
    return n;
}

/// Calls fn(k) for k in [0, n). Iterations are handed out dynamically so uneven work
/// (long Krein rows, contours near clustered roots) balances. If iterations throw, the
/// exception from the lowest index is rethrown on the calling thread, so failures report
/// the same way regardless of the thread count.
template <class F>
void parallel_for(int n, F&& fn, int threads = thread_limit()) {
    threads = std::clamp(threads, 1, std::max(1, n));
    if (threads == 1) {
        for (int k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    int err_k = n;
    std::mutex mu;
    auto worker = [&] {
        for (int k = next++; k < n; k = next++) {
            try {
                fn(k);
            } catch (...) {
                std::lock_guard lock(mu);
                if (k < err_k) {
                    err = std::current_exception();
                    err_k = k;
                }
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(threads - 1);
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();
    if (err) std::rethrow_exception(err);
}

}  // namespace msl
