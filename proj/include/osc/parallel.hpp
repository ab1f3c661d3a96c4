#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace osc {

// Runs fn(chunk) for chunk in [0, chunks). Work is handed out dynamically,
// so fn must write only chunk-indexed state for results to be independent of
// the thread count. The first exception thrown by any worker is rethrown.
template <class Fn>
void parallel_chunks(std::size_t chunks, int threads, Fn&& fn) {
    if (threads <= 1 || chunks <= 1) {
        for (std::size_t i = 0; i < chunks; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_lock;
    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= chunks) return;
            try {
                fn(i);
            } catch (...) {
                std::scoped_lock lk(error_lock);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(threads, static_cast<int>(chunks));
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// Thread count resolution: explicit flag beats OSC_THREADS beats hardware.
inline int resolve_threads(std::optional<int> flag) {
    if (flag && *flag >= 1) return *flag;
    if (const char* env = std::getenv("OSC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace osc
