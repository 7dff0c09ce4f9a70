#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gelmine {

/// Seed scrambler used to derive independent per-item streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Draw helpers below avoid std::*_distribution so that identical seeds give
// identical streams no matter which standard library built the binary.

inline std::size_t rng_below(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

/// Uniform double in [0, 1).
inline double rng_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double rng_range(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * rng_unit(rng);
}

/// Uniform integer in [lo, hi], inclusive on both ends.
inline int rng_int(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng_below(rng, static_cast<std::size_t>(hi - lo + 1)));
}

inline bool rng_chance(std::mt19937_64& rng, double p) {
    return rng_unit(rng) < p;
}

/// k distinct values from {0, ..., n-1} via partial Fisher-Yates.
inline std::vector<int> sample_without_replacement(std::mt19937_64& rng, int k, int n) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k && i < n; ++i) {
        const std::size_t j = i + rng_below(rng, static_cast<std::size_t>(n - i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
        out.push_back(pool[static_cast<std::size_t>(i)]);
    }
    return out;
}

} // namespace gelmine
