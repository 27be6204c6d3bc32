#ifndef CPKIT_RNG_HPP
#define CPKIT_RNG_HPP

#include <cstdint>
#include <random>

namespace cpkit {

// splitmix64 finalizer; used to derive independent streams from (seed, index)
// so per-item generation is schedule-independent.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index + 1));
}

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) { // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double gauss(Rng& rng, double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(rng);
}

// Index of the category selected by a weight vector (weights need not sum to 1).
template <typename Weights>
int categorical(Rng& rng, const Weights& w) {
    double total = 0.0;
    for (double x : w) total += x;
    double u = uniform(rng, 0.0, total);
    double acc = 0.0;
    int last = 0, i = 0;
    for (double x : w) {
        acc += x;
        if (u < acc) return i;
        last = i;
        ++i;
    }
    return last;
}

} // namespace cpkit

#endif
