#pragma once

#include "srf/rng.hpp"

#include <omp.h>

#include <cstdint>
#include <vector>

namespace srf {

/// Worker count for trial loops; 0 means the OpenMP default.
struct Jobs {
    int count = 0;
};

/// Runs kernel(trial_index, stream) for every trial and returns the results
/// in trial order. Each trial gets its own stream from (seed, index), so the
/// output is identical for any worker count.
template <typename Result, typename Kernel>
std::vector<Result> map_trials(std::int64_t trials, std::uint64_t seed, Jobs jobs,
                               Kernel&& kernel) {
    std::vector<Result> out(static_cast<std::size_t>(trials));
    const int threads = jobs.count > 0 ? jobs.count : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (std::int64_t i = 0; i < trials; ++i) {
        Rng stream = make_stream(seed, static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] = kernel(i, stream);
    }
    return out;
}

/// Serial reference for map_trials; kept for equality tests and benchmarks.
template <typename Result, typename Kernel>
std::vector<Result> map_trials_serial(std::int64_t trials, std::uint64_t seed, Kernel&& kernel) {
    std::vector<Result> out;
    out.reserve(static_cast<std::size_t>(trials));
    for (std::int64_t i = 0; i < trials; ++i) {
        Rng stream = make_stream(seed, static_cast<std::uint64_t>(i));
        out.push_back(kernel(i, stream));
    }
    return out;
}

}  // namespace srf
