#pragma once

// Seeded randomness with deterministic stream splitting.
//
// Every random consumer derives its generator from (master seed, trial index,
// stream id) through SplitMix64, so results never depend on execution order
// or thread count. Draws avoid std:: distributions, whose output is
// implementation-defined, so a manifest replays bit-identically on any
// conforming standard library.

#include <cstddef>
#include <cstdint>
#include <random>

namespace divlab {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed for the substream of `trial` within stream `stream_id`.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t stream_id) noexcept {
    return splitmix64(splitmix64(splitmix64(master) ^ trial) ^ (stream_id * 0xD1B54A32D192ED03ull));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t trial, std::uint64_t stream_id) {
    return Rng(substream_seed(master, trial, stream_id));
}

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform_real(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Unbiased uniform integer in [0, n). n must be positive.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace divlab
