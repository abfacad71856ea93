#include "mmwave/random.hpp"

#include <cmath>

namespace mmwave {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

Seed derive_seed(Seed base, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t state = splitmix64(base);
    for (const auto tag : tags) {
        state = splitmix64(state ^ splitmix64(tag + 0x632BE59BD9B4E019ULL));
    }
    return state;
}

Complex complex_gaussian(Rng& rng, double variance) {
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
}

}  // namespace mmwave
