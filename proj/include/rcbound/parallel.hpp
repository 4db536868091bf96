// parallel.hpp: execution policy for the data-parallel kernels

#pragma once

#include <exception>
#include <mutex>

#include <omp.h>

namespace rcbound {

/// Every parallel kernel keeps a serial reference path selected by this flag.
/// Both paths perform identical floating-point operations per work item, so
/// their results agree bit-for-bit.
enum class Exec { serial, parallel };

inline int max_threads() { return omp_get_max_threads(); }

inline void set_threads(int n) {
    if (n > 0) omp_set_num_threads(n);
}

/// Runs body(i) for i in [0, n). Under Exec::parallel the iterations are
/// distributed over OpenMP threads; the first exception thrown is rethrown
/// on the calling thread once the loop has finished.
template <class Body>
void for_each_index(int n, Exec exec, Body&& body) {
    std::exception_ptr failure;
    std::mutex guard;
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (int i = 0; i < n; ++i) {
        {
            std::lock_guard<std::mutex> lock(guard);
            if (failure) continue;
        }
        try {
            body(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(guard);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

} // namespace rcbound
