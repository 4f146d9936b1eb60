#pragma once

#include <cstdint>
#include <string_view>

namespace coderec::detail {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seeded 64-bit string hash: FNV-1a folded with the seed, then finalized.
constexpr std::uint64_t seeded_hash(std::string_view bytes, std::uint64_t seed) noexcept {
  return mix64(fnv1a64(bytes) ^ mix64(seed + kGolden));
}

}  // namespace coderec::detail
