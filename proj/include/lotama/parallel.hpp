#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace lotama {

// Runs fn(chunk) for chunk in [0, n_chunks). Chunk-to-thread assignment is
// static, and callers reduce per-chunk results in chunk order, so totals are
// bit-identical for any thread count.
inline void parallel_chunks(int n_chunks, const std::function<void(int)>& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    int n_threads = static_cast<int>(hw == 0 ? 1 : hw);
    if (n_threads > n_chunks) n_threads = n_chunks;
    if (n_threads <= 1) {
        for (int c = 0; c < n_chunks; ++c) fn(c);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t]() {
            for (int c = t; c < n_chunks; c += n_threads) fn(c);
        });
    }
    for (auto& th : pool) th.join();
}

// Splits [0, count) into n_chunks contiguous ranges; chunk c covers
// [chunk_begin(c), chunk_begin(c+1)).
inline long chunk_begin(long count, int n_chunks, int c) {
    return count * c / n_chunks;
}

}  // namespace lotama
