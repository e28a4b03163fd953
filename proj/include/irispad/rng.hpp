#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace irispad {

/// Derives an independent stream seed for a labeled consumer ("sampling",
/// "curve", ...) from the single experiment seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

/// Uniform integer in [0, bound) by rejection on raw engine output, so draws
/// are identical across standard library implementations.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(std::mt19937_64& rng);

}  // namespace irispad
