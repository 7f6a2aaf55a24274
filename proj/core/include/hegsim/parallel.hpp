#pragma once

// Static round-robin index partition over a few threads. fn(i) is called
// exactly once per i in [0, count); the exception of the lowest failing index
// is rethrown after all threads join.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace hegsim {

template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
    jobs = std::max(1u, static_cast<unsigned>(std::min<std::size_t>(jobs, count)));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::size_t> failed_at(jobs, count);
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += jobs) {
                try {
                    fn(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                    failed_at[t] = i;
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    const auto first = std::min_element(failed_at.begin(), failed_at.end()) - failed_at.begin();
    if (errors[first]) std::rethrow_exception(errors[first]);
}

}  // namespace hegsim
