#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace vlt2 {

/// Worker count for grid sweeps. 0 = pick automatically. The env var
/// VLT2_THREADS overrides any value set here.
inline int& thread_count() {
    static int n = 1;
    return n;
}

inline void set_threads(int n) { thread_count() = n; }

inline int effective_threads() {
    if (const char* env = std::getenv("VLT2_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const int n = thread_count();
    if (n > 0) return n;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Runs fn(begin, end) over a partition of [0, n). Each index is handled by
/// exactly one worker, so results do not depend on the thread count.
template <class Fn>
void parallel_for(int n, Fn&& fn) {
    const int workers = std::min(effective_threads(), n > 0 ? n : 1);
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int b = w * chunk;
        const int e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& t : pool) t.join();
}

} // namespace vlt2
