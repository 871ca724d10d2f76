#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ncpd {

/// One splitmix64 mixing step.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derive an independent seed from a base seed and a sequence of work-item tags
/// (segment bounds, candidate index, resample index, repetition, ...). Work items
/// seeded this way give identical results regardless of scheduling order.
constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t s = splitmix64(base);
  for (std::uint64_t t : tags) s = splitmix64(s ^ (t + 0x9e3779b97f4a7c15ULL));
  return s;
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace ncpd
