// include/terncorr/parallel.hpp: chunked index-parallel loop with deterministic
// output placement (each index writes only its own slot).

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace terncorr {

inline unsigned default_workers() noexcept { return std::max(1U, std::thread::hardware_concurrency()); }

/// Calls body(begin, end) on contiguous, disjoint chunks of [0, count).
/// The first exception raised by any worker is rethrown after all workers join.
template <typename Body>
void parallel_chunks(std::uint64_t count, Body &&body, unsigned workers = 0) {
    if (workers == 0) {
        workers = default_workers();
    }
    if (count == 0) {
        return;
    }
    const std::uint64_t w = std::min<std::uint64_t>(workers, count);
    if (w == 1) {
        body(std::uint64_t{0}, count);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::uint64_t i = 0; i < w; ++i) {
        const std::uint64_t begin = count * i / w;
        const std::uint64_t end = count * (i + 1) / w;
        pool.emplace_back([&, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace terncorr
