// parallel.hpp
//
// Deterministic work distribution: bodies write to disjoint, preallocated
// slots, so results are independent of the worker count and of scheduling.

#ifndef QADSE_PARALLEL_HPP
#define QADSE_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace qadse {

// Runs body(begin, end) over contiguous index ranges. Ranges keep sweep
// scratch caches effective and the disjoint-slot convention intact.
inline void parallel_chunks(std::size_t n, int jobs,
                            const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    if (jobs <= 1 || n <= 1) {
        body(0, n);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    const std::size_t n_chunks = std::min(n, workers * 4);
    const std::size_t chunk = (n + n_chunks - 1) / n_chunks;
    std::vector<std::thread> threads;
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&]() {
            for (;;) {
                const std::size_t begin = next.fetch_add(chunk);
                if (begin >= n) return;
                try {
                    body(begin, std::min(begin + chunk, n));
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline void parallel_over(std::size_t n, int jobs,
                          const std::function<void(std::size_t)>& body) {
    parallel_chunks(n, jobs, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) body(i);
    });
}

} // namespace qadse

#endif
