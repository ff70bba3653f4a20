#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace risknet {

using Rng = std::mt19937_64;

/// Mixes a base seed with a sequence of stream indices into an independent
/// seed. Every random stream in the library is addressed this way so that
/// results never depend on scheduling.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> indices);

inline Rng make_rng(std::uint64_t base, std::initializer_list<std::uint64_t> indices) {
  return Rng(derive_seed(base, indices));
}

/// Uniform double in [0, 1) built from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Unbiased integer in [0, bound). bound must be positive.
std::size_t uniform_index(Rng& rng, std::size_t bound);

template <class T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace risknet
