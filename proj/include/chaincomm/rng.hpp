#pragma once

#include <cstdint>
#include <random>

namespace chaincomm {

// Stream derivation is splitmix64-based: seed_k = hash64(master_seed, k).
// Every randomized component derives its stream through hash64 so that
// replicas can be scheduled in any order without changing their draws.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash64(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b));
}

constexpr std::uint64_t hash64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix64(hash64(a, b) ^ mix64(c));
}

// mt19937_64 output is fully pinned by the standard, so trajectories are
// byte-reproducible across platforms as long as we avoid std:: distributions
// (whose algorithms are implementation-defined).
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Uniform in [0,1) with 53 random bits.
inline double unit_double(Rng& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& g, double p) { return unit_double(g) < p; }

// Unbiased integer in [0, bound) via rejection.
inline std::uint64_t bounded_uint(Rng& g, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = g();
    } while (x >= limit);
    return x % bound;
}

}  // namespace chaincomm
