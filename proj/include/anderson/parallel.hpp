#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "anderson/errors.hpp"
#include "anderson/version.hpp"

namespace anderson {

/// Worker count: ANDERSONLAB_WORKERS if set, else hardware concurrency.
inline int default_worker_count() {
    if (const char* env = std::getenv(kWorkersEnvVar)) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Applies `fn` to indices 0..count-1 with at most `workers` threads and
/// returns the results in index order. Each call must be a pure function of
/// its index, so the output is identical for any worker budget; a worker
/// budget of 1 runs the plain sequential loop. If any call throws, the
/// remaining work is drained and the lowest failing index is reported,
/// named by `label`.
template <typename R>
std::vector<R> parallel_map(int count, int workers, const std::function<R(int)>& fn,
                            const char* label = "realization") {
    if (workers < 1) throw ConfigError("worker budget must be >= 1");
    std::vector<R> results(static_cast<std::size_t>(std::max(0, count)));
    if (count <= 0) return results;

    if (workers == 1 || count == 1) {
        for (int i = 0; i < count; ++i) results[static_cast<std::size_t>(i)] = fn(i);
        return results;
    }

    std::atomic<int> next{0};
    std::atomic<bool> stop{false};
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(count));
    std::vector<std::thread> pool;
    const int thread_count = std::min(workers, count);
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) {
        pool.emplace_back([&]() {
            while (!stop.load(std::memory_order_relaxed)) {
                const int i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= count) return;
                try {
                    results[static_cast<std::size_t>(i)] = fn(i);
                } catch (...) {
                    failures[static_cast<std::size_t>(i)] = std::current_exception();
                    stop.store(true, std::memory_order_relaxed);
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();

    for (int i = 0; i < count; ++i) {
        if (failures[static_cast<std::size_t>(i)]) {
            try {
                std::rethrow_exception(failures[static_cast<std::size_t>(i)]);
            } catch (const std::exception& e) {
                throw SolverError(std::string(label) + " " + std::to_string(i) +
                                  " failed: " + e.what());
            }
        }
    }
    return results;
}

} // namespace anderson
