#pragma once

#include <cstdint>

namespace plateletmc {

// SplitMix64 (Steele/Lea/Flood). Used everywhere a seeded stream is needed so
// that trajectories, permutations and weight initialization reproduce exactly
// across platforms and bindings.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Unbiased uniform integer in [0, n) by rejection.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }
};

// Derives an independent stream seed from (seed, stream index). Substreams for
// episodes, features and epochs are all derived through this single function.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    return g.next();
}

}  // namespace plateletmc
