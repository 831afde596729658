#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qucl {

/// Worker count used when a caller passes 0.
int default_workers();
void set_default_workers(int workers);

/// Runs f(i) for i in [0, count) on up to `workers` threads with static striping.
/// Each index is handled by exactly one call, so results written per index are
/// independent of the worker count. The first exception is rethrown.
template <class F>
void parallel_for(std::size_t count, F&& f, int workers = 0) {
    if (workers <= 0) workers = default_workers();
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), count);
    if (w <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::exception_ptr error;
    std::mutex guard;
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t t = 0; t < w; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += w) f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(guard);
                if (!error) error = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

/// parallel_for collecting one result per index, in index order.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, F&& f, int workers = 0) {
    std::vector<T> out(count);
    parallel_for(count, [&](std::size_t i) { out[i] = f(i); }, workers);
    return out;
}

}  // namespace qucl
