#pragma once

#include <cstdint>
#include <random>
#include <vector>

// Seeded randomness helpers. std::mt19937_64 output is fully specified by
// the standard, but the standard distributions are not; every draw here is
// hand-rolled on top of the raw engine so that seeded runs reproduce
// bit-for-bit across platforms and standard libraries.

namespace adadif {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Decorrelated per-stream seed derived from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 1));
}

/// Unbiased draw from {0, ..., n-1} by rejection.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t draw;
    do {
        draw = gen();
    } while (draw >= limit);
    return draw % n;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// k distinct indices from {0, ..., n-1}, via partial Fisher-Yates.
/// Order of the result is the draw order (not sorted).
inline std::vector<std::int64_t> sample_without_replacement(std::mt19937_64& gen,
                                                            std::int64_t n,
                                                            std::int64_t k) {
    std::vector<std::int64_t> pool(n);
    for (std::int64_t i = 0; i < n; ++i) pool[i] = i;
    for (std::int64_t i = 0; i < k; ++i) {
        const std::int64_t j = i + static_cast<std::int64_t>(
            uniform_below(gen, static_cast<std::uint64_t>(n - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

} // namespace adadif
