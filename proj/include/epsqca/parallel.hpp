#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace epsqca {

/// Evaluates f(0..count-1) on a bounded pool of workers and returns results
/// in input order. Tasks must be pure; the output is then independent of the
/// schedule. Exceptions are captured and rethrown on the caller thread.
template <typename R>
std::vector<R> parallel_map(std::size_t count, const std::function<R(std::size_t)> &f) {
    std::vector<std::optional<R>> slots(count);
    if (count > 0) {
        const unsigned workers =
            std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                               static_cast<unsigned>(count));
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto run = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    slots[i].emplace(f(i));
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        };
        if (workers == 1) {
            run();
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
            for (auto &th : pool) th.join();
        }
        if (error) std::rethrow_exception(error);
    }
    std::vector<R> results;
    results.reserve(count);
    for (auto &slot : slots) results.push_back(std::move(*slot));
    return results;
}

} // namespace epsqca
