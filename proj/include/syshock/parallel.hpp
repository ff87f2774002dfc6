#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>

namespace syshock {

/// Runs body(m) for m in [0, n) on `workers` OpenMP threads with a static
/// schedule. The first exception thrown by any iteration is rethrown on the
/// calling thread once the loop has finished. workers <= 1 runs inline.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& body) {
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const long long count = static_cast<long long>(n);
#pragma omp parallel for num_threads(std::max(1, workers)) schedule(static) if (workers > 1)
    for (long long m = 0; m < count; ++m) {
        try {
            body(static_cast<std::size_t>(m));
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace syshock
