#include "risknet/random.hpp"

#include <limits>

namespace risknet {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> indices) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t idx : indices) {
    h = splitmix64(h ^ splitmix64(idx + 0x632be59bd9b4e019ULL));
  }
  return h;
}

std::size_t uniform_index(Rng& rng, std::size_t bound) {
  const std::uint64_t n = bound;
  // rejection keeps the result exactly uniform
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return static_cast<std::size_t>(draw % n);
}

}  // namespace risknet
