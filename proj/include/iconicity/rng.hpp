#pragma once

#include "iconicity/types.hpp"

#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace iconicity {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of substream `index` under `seed`. Independent of evaluation order.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Derivation used to fan a master seed out to named analyses:
/// FNV-1a over the seed's little-endian bytes and each tag (NUL-separated),
/// finalized with splitmix64.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::string_view> tags) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  const auto mix = [&h](unsigned char byte) {
    h ^= byte;
    h *= 0x100000001B3ULL;
  };
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(master >> (8 * i)));
  for (auto tag : tags) {
    mix(0);
    for (char c : tag) mix(static_cast<unsigned char>(c));
  }
  return splitmix64(h);
}

/// Uniform integer in [0, bound) by multiply-and-reject; stable across
/// standard library implementations, unlike std::uniform_int_distribution.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
  unsigned __int128 m = static_cast<unsigned __int128>(gen()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(gen()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Fisher-Yates shuffle in place.
template <typename T>
void shuffle_in_place(std::span<T> items, std::mt19937_64& gen) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(gen, i));
    std::swap(items[i - 1], items[j]);
  }
}

inline std::vector<Index> random_permutation(Index n, std::mt19937_64& gen) {
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  shuffle_in_place(std::span<Index>(perm), gen);
  return perm;
}

inline double uniform_unit(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace iconicity
