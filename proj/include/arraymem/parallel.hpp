#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace arraymem {

/// Number of workers to use for `requested` (0 = hardware concurrency).
inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, count) on a bounded pool and returns the results in
/// index order, so the outcome does not depend on scheduling. The first
/// exception thrown by any task is rethrown after all workers stop.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(std::size_t count, int workers, Fn&& fn) {
    std::vector<Result> results(count);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_lock;
    auto work = [&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
            try {
                results[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(error_lock);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };
    const int pool = std::min<int>(resolve_workers(workers), static_cast<int>(std::max<std::size_t>(count, 1)));
    if (pool <= 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        for (int t = 0; t < pool; ++t) threads.emplace_back(work);
        for (auto& t : threads) t.join();
    }
    if (error) std::rethrow_exception(error);
    return results;
}

} // namespace arraymem
