// Deterministic stream derivation for reproducible sampling. Substreams
// are derived from a master seed with splitmix64, so shards can be drawn
// in any order (or on any worker count) and still merge to identical
// totals. Uniform and Gaussian draws avoid std::*_distribution, whose
// output is implementation-defined.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace biloc {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream for (label_a, label_b) under master; labels keep block and chunk
// streams disjoint.
inline std::mt19937_64 derive_stream(std::uint64_t master, std::uint64_t label_a,
                                     std::uint64_t label_b = 0) {
    const std::uint64_t s = splitmix64(splitmix64(master ^ splitmix64(label_a + 1)) ^
                                       splitmix64(label_b + 0x517cc1b727220a95ULL));
    return std::mt19937_64(s);
}

inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Box-Muller; one value per call, the partner draw is discarded.
inline double gaussian(std::mt19937_64& gen) {
    double u1 = uniform01(gen);
    while (u1 <= 0.0) u1 = uniform01(gen);
    const double u2 = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

} // namespace biloc
