#pragma once

#include <cstdint>
#include <random>

namespace biphoton::rng {

// splitmix64 (Steele/Lea/Flood). Used only to spread a user seed into
// well-separated engine seeds for independent substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Substream engine: same (seed, stream) always yields the same sequence,
// independent of how many other streams exist or in what order they run.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    return std::mt19937_64(splitmix64(s));
}

// Uniform double in [0, 1) with 53 random bits. Hand-rolled because the
// standard distributions are not bit-stable across library implementations.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Exact Poisson sampler. Knuth multiplication below mean 30, Hormann's PTRS
// transformed rejection above (both draw from the exact distribution; only
// the expected number of uniforms consumed differs).
std::uint64_t poisson(double mean, std::mt19937_64& g);

} // namespace biphoton::rng
