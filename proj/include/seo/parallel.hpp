#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <type_traits>
#include <vector>

namespace seo {

// Serial is the reference path kept for tests and benchmarks; Parallel fans
// points out over OpenMP threads. Results are gathered by index, so both
// paths return identical vectors for deterministic per-point work.
enum class ExecPolicy { Serial, Parallel };

// 0 restores the OpenMP default (OMP_NUM_THREADS or the core count).
void set_worker_count(int jobs);
[[nodiscard]] int worker_count();

template <typename Fn>
void for_each_index(ExecPolicy policy, std::size_t n, Fn&& fn) {
    if (policy == ExecPolicy::Serial || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr first_error;
    std::size_t first_index = n;
    std::mutex guard;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(guard);
            // Keep the lowest-index failure so error reports are reproducible.
            if (static_cast<std::size_t>(i) < first_index) {
                first_index = static_cast<std::size_t>(i);
                first_error = std::current_exception();
            }
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

template <typename Fn>
[[nodiscard]] auto map_indexed(ExecPolicy policy, std::size_t n, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
    using R = std::invoke_result_t<Fn&, std::size_t>;
    std::vector<R> out(n);
    for_each_index(policy, n, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

}  // namespace seo
