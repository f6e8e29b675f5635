#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <future>
#include <thread>
#include <vector>

namespace featcop::detail {

/// Runs body(i) for i in [0, count) on up to `workers` threads. Each index runs
/// exactly once; the first exception is rethrown after all workers finish.
template <typename Body>
void parallel_for(std::size_t count, Body&& body, unsigned workers = 0) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) body(i);
    };
    std::vector<std::future<void>> pool;
    for (unsigned w = 1; w < workers; ++w) pool.push_back(std::async(std::launch::async, run));
    std::exception_ptr error;
    try {
        run();
    } catch (...) {
        error = std::current_exception();
        next = count;
    }
    for (auto& f : pool) {
        try {
            f.get();
        } catch (...) {
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace featcop::detail
