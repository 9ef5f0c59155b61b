#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace brentlab {

/// Worker count: BRENTLAB_THREADS if set, otherwise hardware concurrency.
inline unsigned default_thread_count() {
    if (const char* env = std::getenv("BRENTLAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1 || v > 4096)
            throw std::invalid_argument("BRENTLAB_THREADS must be an integer in [1, 4096]");
        return static_cast<unsigned>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1u;
}

/// Fixed band layout over the integer range [lo, hi]. The band boundaries
/// depend only on the range and the band count, never on the worker count,
/// so a run's partial results can be merged in band order and reproduce the
/// single-threaded result bit for bit.
struct BandLayout {
    std::uint64_t lo, hi;
    std::size_t bands;

    std::pair<std::uint64_t, std::uint64_t> band(std::size_t i) const {
        const std::uint64_t span = hi - lo + 1;
        const std::uint64_t width = (span + bands - 1) / bands;
        const std::uint64_t b_lo = lo + width * i;
        const std::uint64_t b_hi = std::min(hi, b_lo + width - 1);
        return {b_lo, b_hi};
    }
};

inline std::size_t band_count_for(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi >= lo ? hi - lo + 1 : 0;
    const std::uint64_t n = 1 + span / 512;
    return static_cast<std::size_t>(n < 256 ? n : 256);
}

/// Maps each band to a value of R and merges the per-band results in band
/// order. R must be default-constructible; `map(band_lo, band_hi)` runs on
/// an arbitrary worker, `merge(acc, r)` runs sequentially on the caller.
template <class R, class MapFn, class MergeFn>
R band_reduce(std::uint64_t lo, std::uint64_t hi, unsigned threads,
              MapFn map, MergeFn merge) {
    if (hi < lo)
        return R{};
    if (threads == 0)
        threads = default_thread_count();
    const BandLayout layout{lo, hi, band_count_for(lo, hi)};
    std::vector<R> parts(layout.bands);

    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1, std::memory_order_relaxed);
            if (i >= layout.bands)
                return;
            const auto [b_lo, b_hi] = layout.band(i);
            if (b_lo <= b_hi)
                parts[i] = map(b_lo, b_hi);
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(layout.bands));
        pool.reserve(n);
        for (unsigned t = 0; t < n; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    R acc{};
    for (auto& part : parts)
        merge(acc, part);
    return acc;
}

} // namespace brentlab
