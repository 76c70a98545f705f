#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace relnet {

/// Runs fn(begin, end) over `threads` contiguous chunks of [0, n).
///
/// Only elementwise maps go through here (each index computed independently
/// from shared read-only state, written to its own slot), so the result is
/// bit-identical for any thread count. Reductions that are sensitive to
/// summation order are done sequentially by the callers.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n < 2048) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + threads - 1) / threads;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t b = t * chunk;
        if (b >= n) break;
        const std::size_t e = std::min(n, b + chunk);
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

} // namespace relnet
