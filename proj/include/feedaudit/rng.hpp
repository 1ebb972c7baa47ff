#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace feedaudit {

// Engine is std::mt19937_64 (sequence fixed by the standard); the helpers
// below replace the implementation-defined std distributions so that every
// draw is identical across standard libraries.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for an independent stream identified by (seed, stream, index).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0);

/// Uniform double in [0, 1) built from the top 53 bits.
double uniform01(Rng& rng);

/// Uniform integer in [0, n) by rejection sampling; n must be positive.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

double uniform_real(Rng& rng, double lo, double hi);

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace feedaudit
