#pragma once

#include <cstdint>
#include <random>

namespace srf {

using Rng = std::mt19937_64;

/// Independent stream for (master seed, stream id); a pure function of both,
/// so trial statistics never depend on which worker runs the trial.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(master_seed),
        static_cast<std::uint32_t>(master_seed >> 32),
        static_cast<std::uint32_t>(stream_id),
        static_cast<std::uint32_t>(stream_id >> 32),
        0x5eedu,
    };
    return Rng(seq);
}

template <typename G>
double uniform01(G& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

template <typename G>
bool bernoulli(G& rng, double p) {
    return uniform01(rng) < p;
}

}  // namespace srf
