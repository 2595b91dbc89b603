#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace heatbv {

/// Worker count: HEATBV_THREADS env var if set, else hardware concurrency.
inline unsigned thread_count() {
    if (const char* env = std::getenv("HEATBV_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

inline constexpr std::size_t kParallelChunk = 256;

/// Runs fn(chunk_index, begin, end) over [0,n) split into fixed-size chunks.
/// Chunk boundaries depend only on n, never on the thread count, so per-chunk
/// partial results (and any in-order reduction of them) are reproducible.
inline void parallel_for_chunks(std::size_t n,
                                const std::function<void(std::size_t, std::size_t, std::size_t)>& fn,
                                std::size_t chunk = kParallelChunk) {
    if (n == 0) return;
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    const unsigned nthreads = std::min<std::size_t>(thread_count(), nchunks);
    if (nthreads <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c)
            fn(c, c * chunk, std::min(n, (c + 1) * chunk));
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= nchunks) break;
            fn(c, c * chunk, std::min(n, (c + 1) * chunk));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

inline std::size_t num_chunks(std::size_t n, std::size_t chunk = kParallelChunk) {
    return n == 0 ? 0 : (n + chunk - 1) / chunk;
}

}  // namespace heatbv
