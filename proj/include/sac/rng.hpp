#ifndef SAC_RNG_HPP
#define SAC_RNG_HPP

#include <cmath>
#include <cstdint>

namespace sac {

// Counter-based random streams.  Every variate is a pure function of
// (seed, stream, counter), so sampling is reproducible under any scheduling
// and truncating the number of streams never perturbs the retained ones.
// Generator family (fixed per release): SplitMix64 finalizer for mixing,
// Box-Muller for the normal map.

inline constexpr std::uint64_t kSeedGamma = 0x9e3779b97f4a7c15ull;

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += kSeedGamma;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Mixes (seed, stream, counter) into one well-scrambled 64-bit word.
constexpr std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t stream,
                                     std::uint64_t counter) {
  std::uint64_t z = splitmix64(seed ^ (kSeedGamma * (stream + 1)));
  z = splitmix64(z ^ (0xd1b54a32d192ed03ull * (counter + 1)));
  return z;
}

/// Derived seed for an indexed substream (e.g. one Monte Carlo sample).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base ^ (0x8cb92ba72f3d8dd7ull * (index + 1)));
}

/// Maps 64 random bits to the open interval (0,1).
inline double uniform_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal variate at position `counter` of stream `stream`.
inline double normal_sample(std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t counter) {
  const double u1 = uniform_open(counter_bits(seed, stream, 2 * counter));
  const double u2 = uniform_open(counter_bits(seed, stream, 2 * counter + 1));
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace sac

#endif  // SAC_RNG_HPP
