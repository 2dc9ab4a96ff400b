#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qcp {

/// Worker count from QCP_THREADS, defaulting to 1.
inline int default_threads()
{
    if (const char* env = std::getenv("QCP_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

/// Runs f(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled exactly once; results written by index are independent of the
/// thread count. The first exception is rethrown after all workers finish.
template <typename F>
void parallel_for(long n, int threads, F&& f)
{
    if (threads <= 1 || n <= 1) {
        for (long i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr error;
    std::mutex m;
    const auto worker = [&] {
        for (long i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(m);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const long count = std::min<long>(threads, n);
    for (long t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace qcp
