#include "projsum/rng.hpp"

namespace projsum {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) noexcept {
  return mix64(mix64(seed) ^ mix64(label + 0x5851F42D4C957F2DULL));
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return derive_seed(seed, stream::kSampleBase + index);
}

}  // namespace projsum
