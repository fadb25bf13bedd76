#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nsfix {

/// Worker count from NSFIX_THREADS, else the hardware concurrency.
inline int thread_count()
{
    if (const char* env = std::getenv("NSFIX_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) {
            return n;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [begin, end). Each index is handled by exactly one
/// worker, so results written per index do not depend on the thread count.
template <typename Body>
void parallel_for(int begin, int end, const Body& body)
{
    const int count = end - begin;
    const int workers = std::min(thread_count(), count);
    if (workers <= 1) {
        for (int i = begin; i < end; ++i) {
            body(i);
        }
        return;
    }
    std::exception_ptr failure;
    std::mutex guard;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int i = begin + w; i < end; i += workers) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(guard);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace nsfix
