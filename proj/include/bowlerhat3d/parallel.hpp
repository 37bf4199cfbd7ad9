#ifndef BH3D_PARALLEL_HPP
#define BH3D_PARALLEL_HPP

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace bh3d {

/// threads <= 0 means "use all hardware threads".
inline int resolve_threads(int threads) {
    if (threads > 0) return threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Split [begin, end) into at most `threads` contiguous chunks and run
/// fn(chunk_begin, chunk_end) on each. Every index is processed by exactly
/// one worker, so functions that write disjoint output ranges produce the
/// same bits for any thread count.
template <typename Fn>
void parallel_chunks(std::int64_t begin, std::int64_t end, int threads, Fn&& fn) {
    const std::int64_t n = end - begin;
    if (n <= 0) return;
    int t = resolve_threads(threads);
    if (static_cast<std::int64_t>(t) > n) t = static_cast<int>(n);
    if (t <= 1) {
        fn(begin, end);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(t));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(t));
    const std::int64_t chunk = (n + t - 1) / t;
    for (int i = 0; i < t; ++i) {
        const std::int64_t lo = begin + i * chunk;
        const std::int64_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([&, i, lo, hi]() {
            try {
                fn(lo, hi);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace bh3d

#endif
