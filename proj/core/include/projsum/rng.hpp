#pragma once

#include <cstdint>
#include <random>

namespace projsum {

/// SplitMix64 finalizer; used to derive independent substream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of the substream `label` of `seed`. Distinct labels give
/// statistically independent streams, and adding new labels never perturbs
/// the streams of existing ones.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) noexcept;

/// Well-known substream labels.
namespace stream {
inline constexpr std::uint64_t kRotationP = 0x70;  // U in P = U P' U*
inline constexpr std::uint64_t kRotationQ = 0x71;  // V in Q = V Q' V*
inline constexpr std::uint64_t kSampleBase = 0x1000;
inline constexpr std::uint64_t kAuxiliary = 0xA0;
}  // namespace stream

/// Seed used for the i-th independent realization drawn from a base seed.
std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) noexcept;

using RandomStream = std::mt19937_64;

inline RandomStream make_stream(std::uint64_t seed, std::uint64_t label) {
  return RandomStream(derive_seed(seed, label));
}

}  // namespace projsum
