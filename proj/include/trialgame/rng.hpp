#pragma once

#include <cstdint>

namespace trialgame::rng {

// splitmix64 (Steele, Lea & Flood 2014). 64-bit state, invertible finalizer,
// passes BigCrush. Chosen because the whole generator is a handful of integer
// ops: identical seeds give bit-identical streams on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double strictly inside (0,1): 53 random bits centered on the
    // half-ulp grid, so 0 and 1 are unreachable and quantiles stay finite.
    double next_uniform_open() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t x) noexcept {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed for logical stream `index` under a run seed. Keyed rather than
// sequentially split, so any subset of indices can be generated in any
// order (or on any thread) with identical results.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
}

inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) noexcept {
    return SplitMix64(derive_seed(seed, index));
}

} // namespace trialgame::rng
