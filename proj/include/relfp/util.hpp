#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace relfp {

/// Chunked parallel loop over [begin, end). Work items must be independent;
/// results are identical for any thread count.
inline void parallel_for(int begin, int end, int threads,
                         const std::function<void(int)>& body) {
    const int n = end - begin;
    if (threads <= 1 || n < 2 * threads) {
        for (int i = begin; i < end; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int lo = begin + t * chunk;
        const int hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (int i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace relfp
