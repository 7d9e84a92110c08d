// Deterministic fan-out: work items are split into contiguous chunks that run
// on std::async tasks; per-chunk results come back in chunk order, so any
// reduction over them is independent of scheduling.

#pragma once

#include <future>
#include <thread>
#include <vector>

namespace normlab {

/// Applies fn(begin, end) to contiguous chunks covering [0, count) and
/// returns the chunk results in order. fn must not touch shared mutable
/// state.
template <class Fn>
auto run_chunked(long count, Fn&& fn) {
    using Result = decltype(fn(0L, 0L));
    std::vector<Result> results;
    if (count <= 0) return results;

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const long chunks = std::min<long>(count, std::min<unsigned>(hw, 16));
    const long chunk_size = (count + chunks - 1) / chunks;

    if (chunks == 1) {
        results.push_back(fn(0L, count));
        return results;
    }

    std::vector<std::future<Result>> futures;
    futures.reserve(static_cast<std::size_t>(chunks));
    for (long c = 0; c < chunks; ++c) {
        const long begin = c * chunk_size;
        const long end = std::min(count, begin + chunk_size);
        if (begin >= end) break;
        futures.push_back(std::async(std::launch::async, [&fn, begin, end] { return fn(begin, end); }));
    }
    results.reserve(futures.size());
    for (auto& f : futures) results.push_back(f.get());
    return results;
}

}  // namespace normlab
