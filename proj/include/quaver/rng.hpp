#ifndef QUAVER_RNG_HPP
#define QUAVER_RNG_HPP

#include <cstdint>
#include <random>

namespace quaver {

// splitmix64: cheap stateless mixer used to derive independent sub-seeds
// from one master seed. Every stochastic stage (shot sampling, tie breaks,
// dead-end draws) gets its own stream so runs are reproducible bit-for-bit.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

// Uniform double in [0, 1) with 53 random bits. Hand-rolled instead of
// std::uniform_real_distribution, whose output is implementation-defined;
// mt19937_64 itself is pinned by the standard, so results are portable.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). Modulo bias is irrelevant for the tiny n used
// here (lexicon sizes, tie counts) and keeps the draw count predictable.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
    return gen() % n;
}

} // namespace quaver

#endif
