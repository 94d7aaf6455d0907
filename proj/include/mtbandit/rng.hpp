#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mtbandit {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent sub-stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds a master seed and stream tags into one seed. Distinct tag lists give
/// statistically independent generators.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = mix64(master);
  for (auto t : tags) s = mix64(s ^ mix64(t + 0x632be59bd9b4e019ULL));
  return s;
}

// Named sub-stream tags.
inline constexpr std::uint64_t kScheduleStream = 1;
inline constexpr std::uint64_t kPolicyStream = 2;
inline constexpr std::uint64_t kFeedbackStream = 3;
inline constexpr std::uint64_t kSynthStream = 4;

}  // namespace mtbandit
