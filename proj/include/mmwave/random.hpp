#pragma once

#include "mmwave/types.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mmwave {

using Rng = std::mt19937_64;

/// Mixes a base seed with a list of tags into an independent child seed.
/// Pure function: the same inputs always give the same child.
Seed derive_seed(Seed base, std::initializer_list<std::uint64_t> tags);

/// Circularly symmetric complex Gaussian CN(0, variance).
Complex complex_gaussian(Rng& rng, double variance);

}  // namespace mmwave
