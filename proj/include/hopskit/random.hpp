// random.hpp - reproducible per-stream random engines

#pragma once

#include <cstdint>
#include <random>

namespace hops {

// SplitMix64 finalizer; decorrelates nearby seeds before they reach mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Engine for stream `stream` of a run seeded with `seed`.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(~stream)));
}

}  // namespace hops
