#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lamb {

// SOLVER_THREADS: 0 or unset = hardware concurrency
inline int solver_threads() {
    int n = 0;
    if (const char* s = std::getenv("SOLVER_THREADS")) n = std::atoi(s);
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(1, n);
}

// fn(i, worker) for i in [0, n); dynamic scheduling, first exception rethrown
template <class F>
void parallel_for(int n, F&& fn, int threads = 0) {
    int nt = std::min(threads > 0 ? threads : solver_threads(), std::max(1, n));
    if (nt <= 1) {
        for (int i = 0; i < n; ++i) fn(i, 0);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex em;
    std::vector<std::thread> pool;
    for (int w = 0; w < nt; ++w) {
        pool.emplace_back([&, w] {
            for (;;) {
                int i = next++;
                if (i >= n) break;
                try {
                    fn(i, w);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(em);
                    if (!err) err = std::current_exception();
                    next = n;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

} // namespace lamb
