#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace spade4 {

// SplitMix64 mixing step. Used only to derive stream seeds, never as the
// sampling engine itself.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Derives a per-run seed from the master seed and a list of stream indices
// (method id, training size, repetition, ...). A pure function of its
// arguments, so parallel execution order cannot change any result keyed
// this way.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> words) {
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t w : words) {
        s = splitmix64(s ^ w);
    }
    return s;
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

}  // namespace spade4
