#pragma once

#include <cstdint>
#include <random>

namespace nrcsim {

/// SplitMix64 finalizer. Used as a stateless mixing function for counter-based
/// draws so that a vehicle's noise at a given step does not depend on how many
/// other vehicles were updated before it.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Maps the top 53 bits of a 64-bit word to [0, 1).
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform [0, 1) sample keyed by (seed, stream, counter).
constexpr double counter_uniform(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t counter) noexcept {
  return to_unit(mix64(mix64(mix64(seed) ^ stream) ^ counter));
}

/// Seeded stream with a fully specified output sequence (std::mt19937_64 is
/// pinned by the standard; the distributions below are ours, so results do not
/// vary between standard library implementations).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return to_unit(engine_()); }

  /// Uniform integer in [0, n). n must be > 0. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nrcsim
