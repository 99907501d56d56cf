#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace parabolica {

/// Worker count from PARABOLICA_THREADS, else the hardware concurrency (min 1).
std::size_t default_thread_count();

/// Resolves a requested count: 0 means default_thread_count().
std::size_t resolve_threads(std::size_t requested);

/// Runs body(i) for i in [0, count) on up to `threads` workers, handing out
/// indices in blocks of `grain`. body must be safe to call concurrently.
template <class Body>
void parallel_for(std::size_t count, std::size_t threads, std::size_t grain, Body&& body) {
    threads = std::min(resolve_threads(threads), (count + grain - 1) / std::max<std::size_t>(grain, 1));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(grain);
            if (begin >= count) {
                return;
            }
            const std::size_t end = std::min(count, begin + grain);
            for (std::size_t i = begin; i < end; ++i) {
                body(i);
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(threads - 1);
    for (std::size_t t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
}

}  // namespace parabolica
