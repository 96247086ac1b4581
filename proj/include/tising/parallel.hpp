#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace tising {

// Deterministic fan-out: body(i) must write only to slot i of preallocated
// output. Results are independent of the number of worker threads.
inline void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& body) {
    if (n <= 0) return;
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (n < 4 || workers == 1) {
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::int64_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::int64_t lo = static_cast<std::int64_t>(w) * chunk;
        std::int64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::int64_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

// Splits [0,n) into a fixed number of ranges (independent of core count),
// reduces each range sequentially, then folds the per-range results in index
// order. Bit-reproducible on any machine.
template <typename Acc>
Acc ranged_reduce(std::int64_t n, int n_ranges,
                  const std::function<Acc(std::int64_t, std::int64_t)>& range_reduce,
                  const std::function<Acc(const Acc&, const Acc&)>& fold) {
    if (n_ranges < 1) n_ranges = 1;
    std::vector<Acc> partial(static_cast<std::size_t>(n_ranges));
    std::int64_t chunk = (n + n_ranges - 1) / n_ranges;
    parallel_for(n_ranges, [&](std::int64_t r) {
        std::int64_t lo = r * chunk;
        std::int64_t hi = std::min(n, lo + chunk);
        if (lo > hi) lo = hi;
        partial[static_cast<std::size_t>(r)] = range_reduce(lo, hi);
    });
    Acc acc = partial[0];
    for (int r = 1; r < n_ranges; ++r) acc = fold(acc, partial[static_cast<std::size_t>(r)]);
    return acc;
}

}  // namespace tising
