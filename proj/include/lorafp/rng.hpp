#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace lorafp {

// All randomness in the library flows through these helpers. std::mt19937_64 produces a
// standardized bit stream, and the draw algorithms below are spelled out explicitly, so
// seeds reproduce identical results on every platform. std::uniform_int_distribution /
// std::uniform_real_distribution are implementation-defined and must not be used here.
using Rng = std::mt19937_64;

// splitmix64 finalizer; decorrelates derived stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent child seed for stream `index` of a master seed (per-tree RNGs, shuffle vs dropout).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index + 0x100ULL));
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform in (0, 1]; never returns 0, so interval draws below stay inside the open lower end.
inline double uniform_unit_open_low(Rng& rng) {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

// Uniform integer in [0, n) by masked rejection sampling.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t mask = ~0ULL >> __builtin_clzll(n - 1);
    std::uint64_t v;
    do {
        v = rng() & mask;
    } while (v >= n);
    return v;
}

// Fisher-Yates; element i swaps with a uniform draw from [0, i], walking i from the back.
template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(values[i - 1], values[j]);
    }
}

// Identity permutation 0..n-1 shuffled in place.
inline std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    shuffle(perm, rng);
    return perm;
}

}  // namespace lorafp
