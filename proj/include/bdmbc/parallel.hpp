#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace bdmbc {

/// Worker count: BDMBC_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (0 means auto).
inline unsigned thread_count() {
    if (const char* env = std::getenv("BDMBC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(begin, end) over contiguous chunks of [0, count). Chunks write to
/// disjoint outputs, so results do not depend on the worker count.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, std::size_t min_chunk = 256) {
    const std::size_t workers =
        std::min<std::size_t>(thread_count(), (count + min_chunk - 1) / std::max<std::size_t>(min_chunk, 1));
    if (workers <= 1) {
        if (count) fn(std::size_t{0}, count);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t step = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * step, end = std::min(count, begin + step);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    pool.clear();
    if (error) std::rethrow_exception(error);
}

} // namespace bdmbc
