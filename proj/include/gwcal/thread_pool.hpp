#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace gwcal {

/// Evaluates fn(i) for i in [0, n) on up to `jobs` threads and returns the
/// results indexed by i. Work items must be independent; results are written
/// into pre-sized slots so downstream aggregation order never depends on
/// scheduling. The first exception thrown by any item is rethrown.
template <typename T>
std::vector<T> parallel_map(std::size_t n, unsigned jobs,
                            const std::function<T(std::size_t)>& fn) {
    std::vector<T> out(n);
    if (n == 0) return out;
    if (jobs == 0) jobs = std::thread::hardware_concurrency();
    if (jobs <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> threads;
    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
    threads.reserve(count);
    for (unsigned t = 0; t < count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace gwcal
