#pragma once
// Seeded randomness with named sub-streams.
//
// Every randomized stage draws from its own sub-stream derived from the
// master seed and a stream name, so changing e.g. the bootstrap count never
// perturbs the permutation null. No ambient randomness anywhere.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace symatlas {

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Sub-stream generator: master seed + stream name -> independent mt19937_64.
inline std::mt19937_64 substream(std::uint64_t master_seed, std::string_view name) {
    return std::mt19937_64(splitmix64(master_seed ^ fnv1a64(name)));
}

// Bounded draw in [0, n). Avoids std::uniform_int_distribution, whose output
// is implementation-defined; rejection sampling keeps runs reproducible.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return static_cast<std::size_t>(v % n);
}

// Uniform double in [0, 1).
inline double uniform_real(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = uniform_index(rng, i);
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace symatlas
